"""Metric validation, consistency, social cost and cost ratios."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .core import CandidateDistribution, Instance, Metric, VoteProfile, normalize_profile
from .errors import DimensionMismatch, InvalidMetric, MissingMetric


class _Infinity:
    """Tagged +infinity for unbounded distortion; compares above every real."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __float__(self):
        return float("inf")

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("mvd-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def is_infinite(value) -> bool:
    return value is INF


@dataclass(frozen=True)
class Violation:
    v: int
    v_other: int
    x: int
    y: int
    slack: Real  # d(v,y) + d(v',y) + d(v',x) - d(v,x); negative means violated

    def as_tuple(self):
        return (self.v, self.v_other, self.x, self.y, self.slack)


def _check_dims(metric: Metric, profile: VoteProfile):
    if metric.shape != (len(profile), profile.n):
        raise DimensionMismatch(
            f"metric shape {metric.shape} vs profile {len(profile)} x {profile.n}"
        )


def validate_metric(metric: Metric, profile: VoteProfile, tol: float = 0.0) -> list:
    """List violations of non-negativity and the voter-candidate quadrilateral inequality.

    The quadrilateral condition is d(v,x) <= d(v,y) + d(v',y) + d(v',x) for all
    v != v' and x != y. Negative entries are reported as ``(v, v, x, x, d)``.
    ``tol`` is only useful for float metrics.
    """
    _check_dims(metric, profile)
    rows = metric.rows
    m, n = metric.shape
    violations: list[Violation] = []
    for v in range(m):
        for x in range(n):
            if rows[v][x] < -tol:
                violations.append(Violation(v, v, x, x, rows[v][x]))
    # cheapest two-voter detour between every pair of candidates
    detour = [[min(rows[u][x] + rows[u][y] for u in range(m)) for y in range(n)] for x in range(n)]
    for v in range(m):
        row = rows[v]
        for x in range(n):
            for y in range(n):
                if x == y or row[x] - row[y] - detour[x][y] <= tol:
                    continue
                for u in range(m):
                    if u == v:
                        continue
                    slack = row[y] + rows[u][y] + rows[u][x] - row[x]
                    if slack < -tol:
                        violations.append(Violation(v, u, x, y, slack))
    return violations


def is_consistent(metric: Metric, profile: VoteProfile, tol: float = 0.0) -> bool:
    """True iff every ballot lists candidates by non-decreasing distance."""
    _check_dims(metric, profile)
    for row, ranking in zip(metric.rows, profile.rankings):
        for a, b in zip(ranking, ranking[1:]):
            if row[a] - row[b] > tol:  # exact difference, so tol=0.0 never rounds
                return False
    return True


def cost(metric: Metric, profile: VoteProfile, x: int) -> Real:
    """Weighted sum of distances to ``x`` under the normalized profile."""
    profile = normalize_profile(profile)
    return sum((w * row[x] for w, row in zip(profile.weights, metric.rows)), Fraction(0))


def expected_cost(metric: Metric, profile: VoteProfile, dist: CandidateDistribution) -> Real:
    return sum((p * cost(metric, profile, x) for x, p in enumerate(dist.probs) if p), Fraction(0))


def optimal_candidate(metric: Metric, profile: VoteProfile) -> tuple[int, Real]:
    costs = [cost(metric, profile, x) for x in range(profile.n)]
    best = min(range(profile.n), key=lambda x: (costs[x], x))
    return best, costs[best]


def _ratio(numerator, denominator):
    if denominator == 0:
        return INF if numerator > 0 else 1
    return numerator / denominator


def _checked_metric(instance: Instance, tol: float) -> Metric:
    metric = instance.metric
    if metric is None:
        raise MissingMetric("instance carries no metric")
    bad = validate_metric(metric, instance.profile, tol)
    if bad:
        raise InvalidMetric(f"{len(bad)} metric violations, first {bad[0].as_tuple()}")
    if not is_consistent(metric, instance.profile, tol):
        raise InvalidMetric("metric is not consistent with the rankings")
    return metric


def ratio_of(instance: Instance, winner: int, tol: float = 0.0):
    """cost(winner) / cost(optimum) on the instance's own metric.

    Exact metrics give an exact Fraction. Returns :data:`INF` when the
    optimum has cost 0 but the winner does not, and 1 when both are 0.
    """
    metric = _checked_metric(instance, tol)
    _, best = optimal_candidate(metric, instance.profile)
    return _ratio(cost(metric, instance.profile, winner), best)


def expected_ratio(instance: Instance, dist: CandidateDistribution, tol: float = 0.0):
    metric = _checked_metric(instance, tol)
    _, best = optimal_candidate(metric, instance.profile)
    return _ratio(expected_cost(metric, instance.profile, dist), best)
