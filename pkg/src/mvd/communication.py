"""Communication-bounded rules.

A :class:`MessagePartition` labels every one of the ``n!`` rankings with a
message id in ``1..beta``; a voter sends the label of its ranking. Storing
a total labeling makes the message classes disjoint and covering by
construction. A :class:`BoundedRule` pairs a partition with an aggregator
that sees nothing but the weight carried by each message.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .core import Ranking, VoteProfile, normalize_profile
from .errors import BadPositions, EnumerationCap, ParseError

MAX_ENUMERATION_N = 8

Aggregator = Callable[[tuple[Fraction, ...]], int]


@lru_cache(maxsize=None)
def all_rankings(n: int) -> tuple[Ranking, ...]:
    """All permutations of ``range(n)`` in lexicographic order."""
    if n > MAX_ENUMERATION_N:
        raise EnumerationCap(f"n={n} exceeds the enumeration cap of {MAX_ENUMERATION_N}")
    return tuple(itertools.permutations(range(n)))


def lex_index(ranking: Sequence[int]) -> int:
    """Position of ``ranking`` in :func:`all_rankings` (Lehmer code)."""
    n = len(ranking)
    index = 0
    for i, c in enumerate(ranking):
        smaller_after = sum(1 for d in ranking[i + 1:] if d < c)
        index += smaller_after * math.factorial(n - 1 - i)
    return index


@dataclass(frozen=True)
class MessagePartition:
    n: int
    labels: tuple[int, ...]  # message id of each ranking, lexicographic ranking order

    def __post_init__(self):
        rankings = all_rankings(self.n)
        labels = tuple(int(x) for x in self.labels)
        if len(labels) != len(rankings):
            raise ValueError(f"need {len(rankings)} labels, got {len(labels)}")
        beta = max(labels)
        if set(labels) != set(range(1, beta + 1)):
            raise ValueError("message ids must be exactly 1..beta, each used at least once")
        object.__setattr__(self, "labels", labels)

    @property
    def beta(self) -> int:
        return max(self.labels)

    def message_of(self, ranking: Sequence[int]) -> int:
        return self.labels[lex_index(ranking)]

    def members(self, message: int) -> list[Ranking]:
        return [r for r, label in zip(all_rankings(self.n), self.labels) if label == message]

    def classes(self) -> dict[int, list[Ranking]]:
        out: dict[int, list[Ranking]] = {j: [] for j in range(1, self.beta + 1)}
        for r, label in zip(all_rankings(self.n), self.labels):
            out[label].append(r)
        return out

    def representatives(self) -> tuple[Ranking, ...]:
        """Lexicographically first ranking of each class, indexed by id - 1."""
        reps: dict[int, Ranking] = {}
        for r, label in zip(all_rankings(self.n), self.labels):
            reps.setdefault(label, r)
        return tuple(reps[j] for j in range(1, self.beta + 1))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "labels": list(self.labels)}, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> MessagePartition:
        try:
            data = json.loads(text)
            return cls(int(data["n"]), tuple(data["labels"]))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParseError(f"bad partition document: {exc}") from exc


def message_of(partition: MessagePartition, ranking: Sequence[int]) -> int:
    return partition.message_of(ranking)


def partition_from_key(n: int, key: Callable[[Ranking], object]) -> MessagePartition:
    """Rankings with equal ``key`` share a message; ids follow first appearance."""
    ids: dict[object, int] = {}
    labels = []
    for r in all_rankings(n):
        labels.append(ids.setdefault(key(r), len(ids) + 1))
    return MessagePartition(n, tuple(labels))


def check_positions(n: int, positions: Iterable[int]) -> tuple[int, ...]:
    """Validate a 1-based position set and return it sorted."""
    positions = tuple(sorted(set(int(p) for p in positions)))
    if any(not 1 <= p <= n for p in positions):
        raise BadPositions(f"positions {positions} not within 1..{n}")
    return positions


def restriction(ranking: Sequence[int], positions: Sequence[int]) -> tuple[int, ...]:
    return tuple(ranking[p - 1] for p in positions)


def k_entry_partition(n: int, positions: Iterable[int]) -> MessagePartition:
    """One message per assignment of candidates to the given positions.

    Message ids are the lexicographic rank of the restricted assignment, so
    ``beta = n! / (n - k)!``.
    """
    positions = check_positions(n, positions)
    k = len(positions)
    assignments = {a: i + 1 for i, a in enumerate(itertools.permutations(range(n), k))}
    return MessagePartition(
        n, tuple(assignments[restriction(r, positions)] for r in all_rankings(n))
    )


def is_generated_by(partition: MessagePartition, positions: Iterable[int]) -> bool:
    """True iff rankings agreeing on ``positions`` always share a message."""
    positions = check_positions(partition.n, positions)
    seen: dict[tuple[int, ...], int] = {}
    for r, label in zip(all_rankings(partition.n), partition.labels):
        if seen.setdefault(restriction(r, positions), label) != label:
            return False
    return True


def full_information_partition(n: int) -> MessagePartition:
    return MessagePartition(n, tuple(range(1, math.factorial(n) + 1)))


def block_partition(n: int, beta: int) -> MessagePartition:
    """Cut the lexicographic list of rankings into ``beta`` contiguous blocks."""
    total = len(all_rankings(n))
    if not 1 <= beta <= total:
        raise ValueError(f"beta={beta} outside 1..{total}")
    return MessagePartition(n, tuple(i * beta // total + 1 for i in range(total)))


def merged_top_partition(n: int) -> MessagePartition:
    """Full information, except the rankings (0,1,2,..) and (1,0,2,..) share a message."""
    if n < 2:
        raise ValueError("need n >= 2")
    a = tuple(range(n))
    b = (1, 0) + tuple(range(2, n))
    return partition_from_key(n, lambda r: a if r == b else r)


def has_ambiguous_top(partition: MessagePartition):
    """Return ``(message, ranking, ranking')`` with different top choices, or None."""
    first_by_top: dict[int, dict[int, Ranking]] = {}
    for r, label in zip(all_rankings(partition.n), partition.labels):
        tops = first_by_top.setdefault(label, {})
        tops.setdefault(r[0], r)
        if len(tops) > 1:
            first, second = list(tops.values())[:2]
            return label, first, second
    return None


@dataclass(frozen=True)
class BoundedRule:
    partition: MessagePartition
    aggregator: Aggregator
    name: str = "bounded"


def message_weights(partition: MessagePartition, profile: VoteProfile) -> tuple[Fraction, ...]:
    weights = [Fraction(0)] * partition.beta
    for b in normalize_profile(profile).ballots:
        weights[partition.message_of(b.ranking) - 1] += b.weight
    return tuple(weights)


def apply_bounded_rule(rule: BoundedRule, profile: VoteProfile) -> int:
    if profile.n != rule.partition.n:
        raise ValueError("profile and partition disagree on n")
    return rule.aggregator(message_weights(rule.partition, profile))


# ----------------------------------------------------------------- aggregators


def wrap_full_rule(
    partition: MessagePartition, rule: Callable[[VoteProfile], int], name: str = "wrapped"
) -> BoundedRule:
    """Run a full-information rule on one representative ranking per message.

    Only sound when ``rule`` cannot tell apart rankings of the same class,
    e.g. plurality over the top-choice partition.
    """
    reps = partition.representatives()

    def aggregate(weights):
        return rule(VoteProfile.from_rankings(reps, weights))

    return BoundedRule(partition, aggregate, name)


def plurality_on_messages(partition: MessagePartition) -> BoundedRule:
    """Take the heaviest message, elect the most frequent top choice inside its class."""
    favourite = []
    for j, members in sorted(partition.classes().items()):
        counts = [0] * partition.n
        for r in members:
            counts[r[0]] += 1
        favourite.append(max(range(partition.n), key=lambda c: (counts[c], -c)))

    def aggregate(weights):
        heaviest = max(range(len(weights)), key=lambda j: (weights[j], -j))
        return favourite[heaviest]

    return BoundedRule(partition, aggregate, "plurality-on-messages")


def constant_rule(partition: MessagePartition, candidate: int = 0) -> BoundedRule:
    return BoundedRule(partition, lambda weights: candidate, f"constant:c={candidate}")


def hashed_rule(partition: MessagePartition, seed: int) -> BoundedRule:
    """An arbitrary but deterministic rule: winner is a hash of (seed, weights)."""
    from .sampling import SplitMix64

    def aggregate(weights):
        rng = SplitMix64(seed)
        acc = 0
        for w in weights:
            acc = (acc * 1_000_003 + w.numerator * 7919 + w.denominator) % (1 << 61)
        rng.state ^= acc
        return rng.randbelow(partition.n)

    return BoundedRule(partition, aggregate, f"hashed:seed={seed}")
