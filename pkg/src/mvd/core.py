"""Election data model: rankings, weighted vote profiles, metrics, distributions.

Candidates are integers ``0..n-1``. A ranking is a tuple listing candidates
from most to least preferred. Ballot weights are exact :class:`Fraction`
values so that threshold comparisons ("at least an alpha fraction") never
depend on float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

from .errors import BadK, DimensionMismatch, ZeroTotalWeight

Ranking = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions, floats and strings like ``"3/4"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def check_ranking(ranking: Sequence[int], n: int) -> Ranking:
    ranking = tuple(int(c) for c in ranking)
    if len(ranking) != n or sorted(ranking) != list(range(n)):
        raise ValueError(f"ranking {ranking} is not a permutation of 0..{n - 1}")
    return ranking


@dataclass(frozen=True)
class WeightedBallot:
    ranking: Ranking
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))
        w = as_fraction(self.weight)
        if w < 0:
            raise ValueError(f"negative ballot weight {w}")
        object.__setattr__(self, "weight", w)

    @property
    def top(self) -> int:
        return self.ranking[0]


@dataclass(frozen=True)
class VoteProfile:
    """A weighted multiset of full rankings over ``n`` candidates."""

    n: int
    ballots: tuple[WeightedBallot, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one candidate")
        ballots = tuple(
            b if isinstance(b, WeightedBallot) else WeightedBallot(*b) for b in self.ballots
        )
        for b in ballots:
            check_ranking(b.ranking, self.n)
        if not ballots or sum(b.weight for b in ballots) == 0:
            raise ZeroTotalWeight("vote profile has zero total weight")
        object.__setattr__(self, "ballots", ballots)

    @classmethod
    def from_rankings(
        cls, rankings: Iterable[Sequence[int]], weights: Iterable | None = None
    ) -> VoteProfile:
        rankings = [tuple(r) for r in rankings]
        if not rankings:
            raise ZeroTotalWeight("vote profile has no ballots")
        weights = [1] * len(rankings) if weights is None else list(weights)
        if len(weights) != len(rankings):
            raise DimensionMismatch("one weight per ranking required")
        n = len(rankings[0])
        return cls(n, tuple(WeightedBallot(r, w) for r, w in zip(rankings, weights)))

    def __len__(self) -> int:
        return len(self.ballots)

    @property
    def rankings(self) -> tuple[Ranking, ...]:
        return tuple(b.ranking for b in self.ballots)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(b.weight for b in self.ballots)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def is_normalized(self) -> bool:
        return self.total_weight == 1

    def relabel(self, perm: Sequence[int]) -> VoteProfile:
        """Rename candidate ``c`` to ``perm[c]`` in every ballot."""
        return VoteProfile(
            self.n,
            tuple(
                WeightedBallot(tuple(perm[c] for c in b.ranking), b.weight) for b in self.ballots
            ),
        )


def normalize_profile(profile: VoteProfile) -> VoteProfile:
    """Scale weights by exact division so they sum to 1; ballot order is kept."""
    total = profile.total_weight
    if total == 0:
        raise ZeroTotalWeight("cannot normalize a profile with zero total weight")
    if total == 1:
        return profile
    return VoteProfile(
        profile.n, tuple(WeightedBallot(b.ranking, b.weight / total) for b in profile.ballots)
    )


def first_place_shares(profile: VoteProfile) -> tuple[Fraction, ...]:
    """Fraction of (normalized) weight ranking each candidate first."""
    profile = normalize_profile(profile)
    shares = [Fraction(0)] * profile.n
    for b in profile.ballots:
        shares[b.top] += b.weight
    return tuple(shares)


def top_k_view(ranking: Sequence[int], k: int) -> Ranking:
    if not 1 <= k <= len(ranking):
        raise BadK(f"k={k} outside 1..{len(ranking)}")
    return tuple(ranking[:k])


@dataclass(frozen=True)
class Metric:
    """Voter-by-candidate distances; row ``v`` belongs to ballot ``v``.

    Entries are either all exact rationals (``exact`` is True) or floats,
    e.g. witnesses recovered from a floating-point LP.
    """

    rows: tuple[tuple[Real, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise DimensionMismatch("metric rows have different lengths")
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def exact(self) -> bool:
        return all(isinstance(d, Rational) for row in self.rows for d in row)

    def __getitem__(self, idx: tuple[int, int]) -> Real:
        v, x = idx
        return self.rows[v][x]

    def scaled(self, c) -> Metric:
        return Metric(tuple(tuple(c * d for d in row) for row in self.rows))

    def relabel(self, perm: Sequence[int]) -> Metric:
        """Column ``x`` moves to column ``perm[x]``."""
        n = self.shape[1]
        inverse = [0] * n
        for x, px in enumerate(perm):
            inverse[px] = x
        return Metric(tuple(tuple(row[inverse[y]] for y in range(n)) for row in self.rows))


@dataclass(frozen=True)
class Instance:
    profile: VoteProfile
    metric: Metric | None = None

    def __post_init__(self):
        if self.metric is not None and self.metric.shape != (len(self.profile), self.profile.n):
            raise DimensionMismatch(
                f"metric shape {self.metric.shape} does not match "
                f"{len(self.profile)} ballots x {self.profile.n} candidates"
            )


@dataclass(frozen=True)
class CandidateDistribution:
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        if any(p < 0 for p in probs):
            raise ValueError("negative probability")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, n: int, x: int) -> CandidateDistribution:
        return cls(tuple(Fraction(int(i == x)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, p in enumerate(self.probs) if p > 0)

    def __getitem__(self, x: int) -> Fraction:
        return self.probs[x]

    def relabel(self, perm: Sequence[int]) -> CandidateDistribution:
        out = [Fraction(0)] * len(self.probs)
        for x, p in enumerate(self.probs):
            out[perm[x]] = p
        return CandidateDistribution(tuple(out))
