"""Voting rules: Plurality, (top-k) Copeland and the first-choice randomized rules.

Deterministic rules return a candidate index, randomized rules return a
:class:`CandidateDistribution` with exact probabilities. Sampling an
outcome is left to :mod:`mvd.sampling`.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import (
    CandidateDistribution,
    VoteProfile,
    first_place_shares,
    normalize_profile,
)
from .errors import BadDomain, BadK, BadN, BadParams, UnknownRule


def _argmax(values: Sequence) -> int:
    """Index of the largest value, lowest index on ties."""
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best


def plurality(profile: VoteProfile) -> int:
    return _argmax(first_place_shares(profile))


class Pref(enum.Enum):
    X = "x-preferred"
    Y = "y-preferred"
    UNKNOWN = "unknown"


def prefers_topk(ranking: Sequence[int], k: int, x: int, y: int) -> Pref:
    """What a mechanism seeing only the top ``k`` entries learns about x vs y."""
    if x == y:
        raise ValueError("x and y must differ")
    top = list(ranking[:k])
    in_x, in_y = x in top, y in top
    if in_x and (not in_y or top.index(x) < top.index(y)):
        return Pref.X
    if in_y:
        return Pref.Y
    return Pref.UNKNOWN


@dataclass(frozen=True)
class ComparisonGraph:
    """Edge (x, y) iff at least ``alpha`` of the weight is known to prefer x to y."""

    n: int
    k: int
    alpha: Fraction
    edges: frozenset[tuple[int, int]]
    top_mass: tuple[Fraction, ...] = field(default=())  # weight with x among the top k

    def successors(self, x: int) -> list[int]:
        return sorted(y for (a, y) in self.edges if a == x)

    def out_degree(self, x: int, within: Iterable[int] | None = None) -> int:
        allowed = set(range(self.n) if within is None else within)
        return sum(1 for (a, y) in self.edges if a == x and y in allowed)

    def induced(self, nodes: Iterable[int]) -> frozenset[tuple[int, int]]:
        nodes = set(nodes)
        return frozenset((a, b) for (a, b) in self.edges if a in nodes and b in nodes)


def _check_k(k: int, n: int):
    if not 1 <= k <= n:
        raise BadK(f"k={k} outside 1..{n}")


def preference_mass(profile: VoteProfile, k: int) -> list[list[Fraction]]:
    """mass[x][y] = normalized weight of ballots where top-k info shows x over y."""
    profile = normalize_profile(profile)
    n = profile.n
    mass = [[Fraction(0)] * n for _ in range(n)]
    for b in profile.ballots:
        if not b.weight:
            continue
        top = b.ranking[:k]
        rest = b.ranking[k:]
        for i, x in enumerate(top):
            for y in top[i + 1:]:
                mass[x][y] += b.weight
            for y in rest:
                mass[x][y] += b.weight
    return mass


def build_comparison_graph(profile: VoteProfile, k: int) -> ComparisonGraph:
    profile = normalize_profile(profile)
    n = profile.n
    _check_k(k, n)
    alpha = Fraction(k, 3 * n)
    mass = preference_mass(profile, k)
    edges = frozenset(
        (x, y) for x in range(n) for y in range(n) if x != y and mass[x][y] >= alpha
    )
    top_mass = [Fraction(0)] * n
    for b in profile.ballots:
        for x in b.ranking[:k]:
            top_mass[x] += b.weight
    return ComparisonGraph(n, k, alpha, edges, tuple(top_mass))


def frequent_set(graph: ComparisonGraph, multiple: int) -> list[int]:
    """Candidates in the top-k lists of at least ``multiple * alpha`` of the weight."""
    return [x for x in range(graph.n) if graph.top_mass[x] >= multiple * graph.alpha]


def topk_copeland_with_graph(profile: VoteProfile, k: int) -> tuple[int, ComparisonGraph]:
    graph = build_comparison_graph(profile, k)
    s2 = frequent_set(graph, 2)
    # non-empty by pigeonhole: some candidate sits in >= k/n of all top-k lists
    assert s2, "S2 is empty"
    degrees = {x: graph.out_degree(x, within=s2) for x in s2}
    winner = max(s2, key=lambda x: (degrees[x], -x))
    return winner, graph


def topk_copeland(profile: VoteProfile, k: int) -> int:
    """Max out-degree candidate of the comparison graph restricted to S2."""
    return topk_copeland_with_graph(profile, k)[0]


def copeland(profile: VoteProfile) -> int:
    """Full-information Copeland, realized as top-k Copeland with k = n."""
    return topk_copeland(profile, profile.n)


def bfs_distances(n: int, edges: Iterable[tuple[int, int]], source: int) -> list[float]:
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adjacency[a].append(b)
    dist = [float("inf")] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b in adjacency[a]:
            if dist[b] == float("inf"):
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def uncovered_set(graph: ComparisonGraph) -> set[int]:
    """Candidates reaching every other candidate within two hops."""
    return {
        x
        for x in range(graph.n)
        if max(bfs_distances(graph.n, graph.edges, x)) <= 2
    }


def random_dictatorship(profile: VoteProfile) -> CandidateDistribution:
    return CandidateDistribution(first_place_shares(profile))


def proportional_to_squares(profile: VoteProfile) -> CandidateDistribution:
    nu = first_place_shares(profile)
    total = sum(s * s for s in nu)
    return CandidateDistribution(tuple(s * s / total for s in nu))


def mixed_mechanism(profile: VoteProfile) -> CandidateDistribution:
    """Proportional-to-Squares w.p. 1/(n-1), Random Dictatorship otherwise."""
    n = profile.n
    if n < 2:
        raise BadN("the mixed mechanism needs n >= 2")
    squares = proportional_to_squares(profile).probs
    dictator = random_dictatorship(profile).probs
    a = Fraction(1, n - 1)
    return CandidateDistribution(tuple(a * s + (1 - a) * d for s, d in zip(squares, dictator)))


def random_oligarchy(profile: VoteProfile) -> CandidateDistribution:
    """Exact outcome law of: draw three first choices i.i.d. from the shares,
    elect a repeated candidate if any, else one of the three uniformly."""
    nu = first_place_shares(profile)
    n = len(nu)
    probs = []
    for x, p in enumerate(nu):
        majority = p ** 3 + 3 * p * p * (1 - p)
        others = [nu[y] for y in range(n) if y != x]
        pairs = sum(
            (others[i] * others[j] for i in range(len(others)) for j in range(i + 1, len(others))),
            Fraction(0),
        )
        # 3! orders of a distinct triple {x, y, z}, each electing x w.p. 1/3
        probs.append(majority + 2 * p * pairs)
    return CandidateDistribution(tuple(probs))


def gax_bound(prob_bound: Callable[[Sequence, int], float], nu_grid: Iterable[Sequence]) -> float:
    """1 + 2 max over the grid of q_x(nu) (1 - nu_x) / nu_x.

    Terms with q_x = 0 contribute 0, which covers nu_x = 0.
    """
    worst = 0.0
    for nu in nu_grid:
        for x, share in enumerate(nu):
            q = prob_bound(nu, x)
            if q == 0:
                continue
            term = float("inf") if share == 0 else q * (1 - share) / share
            worst = max(worst, term)
    return 1 + 2 * worst


def technical_bound_g(t, n: int):
    return (n - 1) * t * t + (1 - t) ** 2


def technical_bound_f(t, n: int):
    """(1 - 1/(n-1))(1 - t) + t(1 - t) / ((n-1)t^2 + (1-t)^2) on t in [0, 1]."""
    if n < 2:
        raise BadDomain(f"n={n} must be at least 2")
    if not 0 <= t <= 1:
        raise BadDomain(f"t={t} outside [0, 1]")
    one = Fraction(1) if isinstance(t, (int, Fraction)) else 1.0
    return (one - one / (n - 1)) * (1 - t) + t * (1 - t) / technical_bound_g(t, n)


def mixed_probability_bound(nu, n: int):
    """Upper bound on the mixed mechanism's probability of electing a candidate with share nu."""
    return (1 - Fraction(1, n - 1)) * nu + nu * nu / ((n - 1) * nu * nu + (1 - nu) ** 2)


# ---------------------------------------------------------------- rule grammar

_DETERMINISTIC = {"plurality", "copeland", "topk-copeland"}
_RANDOMIZED = {"random-dictatorship", "prop-squares", "mixed", "random-oligarchy"}
# only meaningful over a message partition, see mvd.communication
_BOUNDED = {"plurality-on-messages", "constant"}
_PARAMS = {"topk-copeland": {"k"}, "constant": {"c"}}
_SPEC_RE = re.compile(r"^([a-z-]+)(?::(.*))?$")


@dataclass(frozen=True)
class RuleSpec:
    name: str
    params: tuple[tuple[str, int], ...] = ()

    @property
    def randomized(self) -> bool:
        return self.name in _RANDOMIZED

    @property
    def bounded_only(self) -> bool:
        return self.name in _BOUNDED

    def param(self, key: str) -> int:
        return dict(self.params)[key]

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params)


def parse_rule(text: str) -> RuleSpec:
    """Parse ``plurality``, ``topk-copeland:k=2``, ``mixed`` and friends."""
    match = _SPEC_RE.match(text.strip())
    if not match:
        raise UnknownRule(f"cannot parse rule {text!r}")
    name, raw = match.groups()
    if name not in _DETERMINISTIC | _RANDOMIZED | _BOUNDED:
        raise UnknownRule(f"unknown rule {name!r}")
    params = {}
    for item in filter(None, (raw or "").split(",")):
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise BadParams(f"parameter {item!r} is not key=<int>") from None
    expected = _PARAMS.get(name, set())
    if set(params) != expected:
        raise BadParams(f"rule {name} takes parameters {sorted(expected)}, got {sorted(params)}")
    return RuleSpec(name, tuple(sorted(params.items())))


def run_rule(spec: RuleSpec | str, profile: VoteProfile) -> int | CandidateDistribution:
    if isinstance(spec, str):
        spec = parse_rule(spec)
    if spec.name == "plurality":
        return plurality(profile)
    if spec.name == "copeland":
        return copeland(profile)
    if spec.name == "topk-copeland":
        k = spec.param("k")
        if not 1 <= k <= profile.n:
            raise BadParams(f"k={k} outside 1..{profile.n}")
        return topk_copeland(profile, k)
    if spec.name == "random-dictatorship":
        return random_dictatorship(profile)
    if spec.name == "prop-squares":
        return proportional_to_squares(profile)
    if spec.name == "mixed":
        return mixed_mechanism(profile)
    if spec.name == "random-oligarchy":
        return random_oligarchy(profile)
    if spec.name == "constant":
        c = spec.param("c")
        if not 0 <= c < profile.n:
            raise BadParams(f"constant candidate {c} outside 0..{profile.n - 1}")
        return c
    raise BadParams(f"rule {spec} needs a message partition")


def as_distribution(outcome: int | CandidateDistribution, n: int) -> CandidateDistribution:
    if isinstance(outcome, CandidateDistribution):
        return outcome
    return CandidateDistribution.point_mass(n, outcome)
