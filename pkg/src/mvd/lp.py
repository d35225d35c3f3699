"""Worst-case distortion by linear programming.

For a fixed profile, outcome distribution ``p`` and reference candidate
``y``, the adversary maximizes ``sum_x p_x cost(x)`` over consistent
pseudo-metrics with ``cost(y) = 1``. Because a metric may be rescaled
freely, this equals the supremum of ``E[cost(outcome)] / cost(y)``, and the
maximum over ``y`` is the distortion. An unbounded LP means the ratio is
unbounded.

The solver is a two-phase dense-tableau simplex. Entering columns use the
largest reduced cost; after a run of degenerate pivots the solver switches
to Bland's smallest-index rule until the objective moves again, which rules
out cycling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg.blas import dger as _dger

from .core import CandidateDistribution, Metric, VoteProfile, normalize_profile
from .metric import INF
from .rules import RuleSpec, as_distribution, parse_rule, run_rule

DEFAULT_TOL = 1e-9
_DEGENERATE_RUN = 25


def lp_tolerance() -> float:
    return float(os.environ.get("MVD_LP_TOL", DEFAULT_TOL))


@dataclass(frozen=True)
class LinearProgram:
    """maximize c.x subject to rows A_i.x (<= or =) b_i and x >= 0."""

    c: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    b: np.ndarray
    labels: tuple[str, ...] = ()  # optional row tags, e.g. "consistency"

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A, dtype=float).reshape(-1, c.size)
        b = np.asarray(self.b, dtype=float)
        if A.shape[0] != b.size or len(self.relations) != b.size:
            raise ValueError("constraint dimensions disagree")
        if set(self.relations) - {"<=", "="}:
            raise ValueError("relations must be '<=' or '='")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_rows(self) -> int:
        return self.b.size

    def count(self, label: str) -> int:
        return sum(1 for tag in self.labels if tag == label)


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: float | None = None
    witness: np.ndarray | None = None
    pivots: int = 0


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, tol: float):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.pivots = 0

    def pivot(self, r: int, j: int):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        # in-place rank-one update; T is Fortran-ordered so dger does not copy
        self.T = _dger(-1.0, col, T[r].copy(), a=T, overwrite_a=True)
        self.basis[r - 1] = j
        self.pivots += 1

    def run(self, allowed: np.ndarray) -> str:
        """Maximize the objective held in row 0 (stored as z - c.x = 0)."""
        tol = self.tol
        degenerate = 0
        while True:
            T = self.T
            reduced = T[0, :-1]
            candidates = np.flatnonzero((reduced < -tol) & allowed)
            if candidates.size == 0:
                return "optimal"
            if degenerate >= _DEGENERATE_RUN:
                j = candidates[0]
            else:
                j = candidates[np.argmin(reduced[candidates])]
            column = T[1:, j]
            rows = np.flatnonzero(column > tol)
            if rows.size == 0:
                return "unbounded"
            ratios = T[1:, -1][rows] / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + tol * max(1.0, abs(best))]
            r = tied[np.argmin(self.basis[tied])] + 1
            degenerate = degenerate + 1 if best <= tol else 0
            self.pivot(r, j)


def solve_lp(lp: LinearProgram, tol: float | None = None) -> LpResult:
    tol = lp_tolerance() if tol is None else tol
    A, b = lp.A.copy(), lp.b.copy()
    m, nv = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    is_le = np.array([rel == "<=" for rel in lp.relations], dtype=bool)
    # a flipped <= row becomes >=: its slack enters negatively and needs an artificial
    slack_sign = np.where(flip, -1.0, 1.0)
    slack_rows = np.flatnonzero(is_le)
    needs_art = np.flatnonzero(~is_le | flip)
    ns, na = slack_rows.size, needs_art.size
    width = nv + ns + na + 1
    T = np.zeros((m + 1, width), order="F")
    T[1:, :nv] = A
    T[1 + slack_rows, nv + np.arange(ns)] = slack_sign[slack_rows]
    T[1 + needs_art, nv + ns + np.arange(na)] = 1.0
    T[1:, -1] = b
    basis = np.full(m, -1, dtype=np.int64)
    positive_slack = slack_rows[~flip[slack_rows]]
    basis[positive_slack] = nv + np.flatnonzero(~flip[slack_rows])
    basis[needs_art] = nv + ns + np.arange(na)
    tab = _Tableau(T, basis, tol)
    art_cols = np.zeros(width - 1, dtype=bool)
    art_cols[nv + ns:] = True

    if na:
        # phase 1: maximize -sum(artificials)
        T[0, nv + ns:-1] = 1.0
        T[0] -= T[1 + needs_art].sum(axis=0)
        tab.run(np.ones(width - 1, dtype=bool))
        T = tab.T
        if T[0, -1] < -tol * max(1.0, np.abs(b).max()):
            return LpResult("infeasible", pivots=tab.pivots)
        keep = np.ones(m + 1, dtype=bool)
        for r in range(1, m + 1):
            if not art_cols[basis[r - 1]]:
                continue
            row = tab.T[r, :nv + ns]
            options = np.flatnonzero(np.abs(row) > tol)
            if options.size:
                tab.pivot(r, options[0])
            else:
                keep[r] = False  # redundant row
        T = np.asfortranarray(tab.T[keep])
        basis = tab.basis[keep[1:]]
        tab.T, tab.basis = T, basis
    T[0] = 0.0
    T[0, :nv] = -lp.c
    for r, j in enumerate(basis, start=1):
        if T[0, j] != 0.0:
            T[0] -= T[0, j] * T[r]
    status = tab.run(~art_cols)
    T = tab.T
    if status == "unbounded":
        return LpResult("unbounded", pivots=tab.pivots)
    x = np.zeros(nv)
    for r, j in enumerate(tab.basis, start=1):
        if j < nv:
            x[j] = T[r, -1]
    x[x < 0] = 0.0  # clip round-off
    return LpResult("optimal", float(lp.c @ x), x, tab.pivots)


# ------------------------------------------------------------ worst-case LPs


def _var(v: int, x: int, n: int) -> int:
    return v * n + x


def build_worstcase_lp(
    profile: VoteProfile, winning_dist: CandidateDistribution, reference: int
) -> LinearProgram:
    """The adversary's LP with one quadrilateral row per (v, v', x, y)."""
    profile = normalize_profile(profile)
    m, n = len(profile), profile.n
    nv = m * n
    rows, rels, rhs, labels = [], [], [], []

    def add(coeffs: dict[int, float], rel: str, bound: float, label: str):
        row = np.zeros(nv)
        for j, a in coeffs.items():
            row[j] += a
        rows.append(row)
        rels.append(rel)
        rhs.append(bound)
        labels.append(label)

    for v, ranking in enumerate(profile.rankings):
        for a, b in zip(ranking, ranking[1:]):
            add({_var(v, a, n): 1.0, _var(v, b, n): -1.0}, "<=", 0.0, "consistency")
    for v in range(m):
        for u in range(m):
            if u == v:
                continue
            for x in range(n):
                for y in range(n):
                    if x == y:
                        continue
                    add(
                        {
                            _var(v, x, n): 1.0,
                            _var(v, y, n): -1.0,
                            _var(u, y, n): -1.0,
                            _var(u, x, n): -1.0,
                        },
                        "<=",
                        0.0,
                        "quadrilateral",
                    )
    add(
        {_var(v, reference, n): float(w) for v, w in enumerate(profile.weights)},
        "=",
        1.0,
        "normalization",
    )
    c = np.zeros(nv)
    for v, w in enumerate(profile.weights):
        for x, p in enumerate(winning_dist.probs):
            c[_var(v, x, n)] += float(w * p)
    return LinearProgram(c, np.array(rows).reshape(len(rows), nv), tuple(rels), np.array(rhs), tuple(labels))


def build_compact_lp(
    profile: VoteProfile, winning_dist: CandidateDistribution, reference: int
) -> LinearProgram:
    """Equivalent LP with auxiliary candidate-pair variables.

    ``D[x,y]`` stands for the cheapest two-hop detour ``min_u d(u,x) + d(u,y)``:
    rows ``D[x,y] <= d(u,x) + d(u,y)`` for every voter, and
    ``|d(v,x) - d(v,y)| <= D[x,y]``. The latter only binds in the direction
    the ranking does not already fix, so one row per ordered pair suffices.
    Projected onto the d variables, the feasible set is exactly the one of
    :func:`build_worstcase_lp`, with O(m n^2) rows instead of O(m^2 n^2).
    """
    profile = normalize_profile(profile)
    m, n = len(profile), profile.n
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    pair_index = {p: i for i, p in enumerate(pairs)}
    nd = m * n
    nv = nd + len(pairs)
    rows, rels, rhs, labels = [], [], [], []

    def add(coeffs, rel, bound, label):
        row = np.zeros(nv)
        for j, a in coeffs:
            row[j] += a
        rows.append(row)
        rels.append(rel)
        rhs.append(bound)
        labels.append(label)

    for v, ranking in enumerate(profile.rankings):
        for a, b in zip(ranking, ranking[1:]):
            add([(_var(v, a, n), 1.0), (_var(v, b, n), -1.0)], "<=", 0.0, "consistency")
    for (x, y), i in pair_index.items():
        for u in range(m):
            add([(nd + i, 1.0), (_var(u, x, n), -1.0), (_var(u, y, n), -1.0)], "<=", 0.0, "detour")
    for v, ranking in enumerate(profile.rankings):
        pos = {c: i for i, c in enumerate(ranking)}
        for (x, y), i in pair_index.items():
            near, far = (x, y) if pos[x] < pos[y] else (y, x)
            add([(_var(v, far, n), 1.0), (_var(v, near, n), -1.0), (nd + i, -1.0)], "<=", 0.0, "gap")
    add([(_var(v, reference, n), float(w)) for v, w in enumerate(profile.weights)], "=", 1.0, "normalization")
    c = np.zeros(nv)
    for v, w in enumerate(profile.weights):
        for x, p in enumerate(winning_dist.probs):
            c[_var(v, x, n)] += float(w * p)
    return LinearProgram(c, np.array(rows), tuple(rels), np.array(rhs), tuple(labels))


@dataclass(frozen=True)
class WorstCase:
    value: object  # float or INF
    reference: int | None  # candidate attaining the maximum
    witness: Metric | None  # per-ballot distances, scaled so cost(reference) = 1
    distribution: CandidateDistribution
    winner: int | None = None


def _merge_identical(profile: VoteProfile) -> tuple[VoteProfile, list[int]]:
    """Collapse ballots with equal rankings into one voter of summed weight.

    Averaging the distance rows of two same-ranking voters keeps every
    constraint satisfied and the objective unchanged, so the merged LP has
    the same optimum. Zero-weight ballots stay in as weight-0 voters.
    """
    order: dict[tuple, int] = {}
    weights: list[Fraction] = []
    owner = []
    for b in profile.ballots:
        if b.ranking not in order:
            order[b.ranking] = len(weights)
            weights.append(Fraction(0))
        weights[order[b.ranking]] += b.weight
        owner.append(order[b.ranking])
    merged = VoteProfile.from_rankings(list(order), weights)
    return merged, owner


def worst_case(
    profile: VoteProfile, winning_dist: CandidateDistribution, tol: float | None = None
) -> WorstCase:
    profile = normalize_profile(profile)
    merged, owner = _merge_identical(profile)
    n = profile.n
    best_value, best_ref, best_x = None, None, None
    for y in range(n):
        if winning_dist.probs[y] == 1:
            continue  # ratio is identically 1 for this reference
        result = solve_lp(build_compact_lp(merged, winning_dist, y), tol)
        if result.status == "unbounded":
            return WorstCase(INF, y, None, winning_dist)
        if result.status != "optimal":
            raise RuntimeError(f"worst-case LP for reference {y} is {result.status}")
        if best_value is None or result.value > best_value:
            best_value, best_ref, best_x = result.value, y, result.witness
    if best_value is None:
        # single candidate carrying all the probability: ratio is 1
        uniform = Metric(tuple((1.0,) * n for _ in profile.ballots))
        return WorstCase(1.0, None, uniform, winning_dist)
    mrows = best_x[: len(merged) * n].reshape(len(merged), n)
    rows = tuple(tuple(float(d) for d in mrows[o]) for o in owner)
    return WorstCase(best_value, best_ref, Metric(rows), winning_dist)


def distortion_of(
    profile: VoteProfile, winning_dist: CandidateDistribution, tol: float | None = None
):
    """Sup over consistent metrics of E[cost(outcome)] / cost(optimum); may be INF."""
    return worst_case(profile, winning_dist, tol).value


def rule_distortion(rule: RuleSpec | str, profile: VoteProfile, tol: float | None = None) -> WorstCase:
    spec = parse_rule(rule) if isinstance(rule, str) else rule
    profile = normalize_profile(profile)
    outcome = run_rule(spec, profile)
    dist = as_distribution(outcome, profile.n)
    report = worst_case(profile, dist, tol)
    winner = None if isinstance(outcome, CandidateDistribution) else outcome
    return WorstCase(report.value, report.reference, report.witness, dist, winner)


def point_mass_distortion(profile: VoteProfile, winner: int, tol: float | None = None):
    return distortion_of(profile, CandidateDistribution.point_mass(profile.n, winner), tol)


def witness_rows(result: LpResult, m: int, n: int) -> Sequence[Sequence[float]]:
    return result.witness[: m * n].reshape(m, n).tolist()
