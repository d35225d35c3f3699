"""Seeded, platform-independent sampling.

Generator: SplitMix64. With a 64-bit unsigned state ``s`` each draw does::

    s = (s + 0x9E3779B97F4A7C15) mod 2**64
    z = s
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

``randbelow(b)`` rejects draws ``>= 2**64 - (2**64 mod b)`` and returns
``draw mod b``, so it is exactly uniform. A ballot is the identity
permutation shuffled by Fisher-Yates: for ``i = n-1 .. 1`` swap positions
``i`` and ``randbelow(i + 1)``. Ballots are drawn one after another from a
single generator seeded with the user seed.
"""

from __future__ import annotations

import math

from .core import CandidateDistribution, Instance, VoteProfile
from .errors import CapExceeded

_MASK = (1 << 64) - 1
MAX_SAMPLE_N = 7
MAX_SAMPLE_M = 30


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        if bound < 1:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % bound

    def permutation(self, n: int) -> tuple[int, ...]:
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
        return tuple(items)


def sample_instance(seed: int, n: int, m: int) -> Instance:
    """``m`` unit-weight ballots drawn uniformly from the ``n!`` rankings."""
    if not 1 <= n <= MAX_SAMPLE_N or not 1 <= m <= MAX_SAMPLE_M:
        raise CapExceeded(f"sampling supports n <= {MAX_SAMPLE_N}, m <= {MAX_SAMPLE_M}")
    rng = SplitMix64(seed)
    return Instance(VoteProfile.from_rankings([rng.permutation(n) for _ in range(m)]))


def sample_outcome(dist: CandidateDistribution, seed: int) -> int:
    """Draw one candidate from an exact distribution."""
    common = math.lcm(*(p.denominator for p in dist.probs))
    ticket = SplitMix64(seed).randbelow(common)
    acc = 0
    for x, p in enumerate(dist.probs):
        acc += int(p * common)
        if ticket < acc:
            return x
    raise AssertionError("probabilities do not sum to 1")

