"""Lower-bound constructions against communication-bounded rules.

Each generator builds a vote profile, queries the rule exactly once, and
then writes down an explicit rational metric that is consistent with the
(possibly re-completed) rankings. Re-completing a ranking never changes its
message, so the rule's answer stays valid. The resulting ratio is certified
by :func:`mvd.metric.ratio_of`, which re-validates the metric.

Small tie-breaking offsets ``eps_i = eps * i / (n + 1)`` (position ``i``,
1-based) keep all distances distinct and increasing along every ranking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .communication import (
    BoundedRule,
    all_rankings,
    apply_bounded_rule,
    check_positions,
    has_ambiguous_top,
    is_generated_by,
)
from .core import Instance, Metric, VoteProfile, as_fraction
from .errors import BadEpsilon, BadN, BadParams, NotKEntry
from .metric import INF, ratio_of

FAR_FACTOR = 10**6
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AdversaryReport:
    kind: str
    instance: Instance
    winner: int
    certified_ratio: object  # Fraction, or INF
    theoretical_limit: object  # float, or INF
    parameters: dict = field(default_factory=dict)

    def holds(self, slack: float = 0.01) -> bool:
        if self.certified_ratio is INF:
            return True
        if self.theoretical_limit is INF:
            # an unbounded family certifies member by member: ratio >= 1/delta
            target = self.parameters.get("family_target")
            return target is not None and float(self.certified_ratio) >= float(target) - slack
        return float(self.certified_ratio) >= self.theoretical_limit - slack


def _exact(value) -> Fraction:
    # floats go through their shortest repr so 1e-5 becomes exactly 1/100000
    return as_fraction(repr(value)) if isinstance(value, float) else as_fraction(value)


def _offsets(eps: Fraction, n: int) -> list[Fraction]:
    """offsets[i] = eps * i / (n + 1) for positions i = 1..n (index 0 unused)."""
    return [eps * i / (n + 1) for i in range(n + 1)]


def _query(rule: BoundedRule, rankings: Sequence[Sequence[int]], weights) -> int:
    return apply_bounded_rule(rule, VoteProfile.from_rankings(rankings, weights))


def _report(kind, rankings, weights, rows, winner, limit, params) -> AdversaryReport:
    instance = Instance(VoteProfile.from_rankings(rankings, weights), Metric(rows))
    for ranking, row in zip(rankings, rows):
        # each row must reproduce its ballot's ranking on its own
        assert tuple(sorted(range(len(row)), key=lambda c: (row[c], ranking.index(c)))) == tuple(ranking)
    return AdversaryReport(kind, instance, winner, ratio_of(instance, winner), limit, params)


def _row(ranking: Sequence[int], by_position: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Distances of a voter whose position-p candidate gets ``by_position[p - 1]``."""
    row = [Fraction(0)] * len(ranking)
    for p, c in enumerate(ranking):
        row[c] = by_position[p]
    return tuple(row)


def _far_suffix(n_active: int, n: int, nearest: Fraction) -> list[Fraction]:
    """Distances for sacrificed positions n_active+1..n, each 10^6 times the previous scale."""
    out, scale = [], nearest
    for _ in range(n - n_active):
        scale = scale * FAR_FACTOR
        out.append(scale)
    return out


def _sacrificed_winner_rows(rankings, n_active: int, n: int, eps: Fraction):
    """Metric when the rule elects a candidate every voter ranks behind all active ones."""
    off = _offsets(eps, n)
    by_position = [eps + off[p] for p in range(1, n_active + 1)]
    by_position += [1 + off[p] for p in range(n_active + 1, n + 1)]
    return [_row(r, by_position) for r in rankings]


def _single_top_rows(top_first: Sequence[int], delta: Fraction):
    """One voter sitting at ``delta`` from its top choice and about 1 from the rest."""
    n = len(top_first)
    off = _offsets(delta, n)
    by_position = [delta] + [1 + off[p] for p in range(2, n + 1)]
    return [_row(top_first, by_position)]


# ------------------------------------------------------------------- k-entry


def gen_k_entry_adversary(
    rule: BoundedRule, n: int, positions: Sequence[int], epsilon=Fraction(1, 10**4)
) -> AdversaryReport:
    """Force distortion close to (2n - k)/k on a k-entry rule seeing positions K.

    Every candidate-to-position assignment on K gets equal weight. If the
    winner w is not among a voter's K-candidates, the voter ranks w last at
    distance 1 and everything else within 2*eps; otherwise the voter sits at about
    1/2 from everyone. When n itself is in K, the candidate in last position
    is sacrificed: ranked last by all at a huge distance, and the
    construction runs on the remaining candidates.
    """
    eps = _exact(epsilon)
    if not 0 < eps < Fraction(1, 8):
        raise BadEpsilon(f"epsilon={epsilon} must lie in (0, 1/8)")
    if n < 2 or rule.partition.n != n:
        raise BadParams(f"need n >= 2 matching the rule's partition (n={rule.partition.n})")
    K = check_positions(n, positions)
    if not is_generated_by(rule.partition, K):
        raise NotKEntry(f"rule {rule.name} is not determined by positions {K}")
    k = len(K)
    limit = INF if k == 0 else (2 * n - k) / k

    n_active, remaining = n, set(K)
    while remaining and n_active in remaining:
        remaining.discard(n_active)
        n_active -= 1
    suffix = tuple(range(n_active, n))  # sacrificed candidate c sits at position c + 1
    k_active = len(remaining)
    params = {
        "epsilon": eps,
        "positions": list(K),
        "sacrificed": list(suffix),
        "active_candidates": n_active,
        "active_positions": sorted(remaining),
    }
    if limit is INF:
        # no positions at all: a family whose members reach 1/(2 eps)
        params["family_target"] = 1 / (2 * eps)
    off = _offsets(eps, n)

    if k_active == 0:
        params["construction_limit"] = "inf" if n_active >= 2 else 1
        base = tuple(range(n_active)) + suffix
        w = _query(rule, [base], [1])
        if w >= n_active or n_active == 1:
            rows = _sacrificed_winner_rows([base], n_active, n, eps)
            return _report("k-entry", [base], [1], rows, w, limit, params)
        y = 1 if w == 0 else 0
        ranking = (y,) + tuple(c for c in range(n_active) if c != y) + suffix
        by_position = [eps] + [1 + off[p] for p in range(2, n_active + 1)]
        by_position += _far_suffix(n_active, n, by_position[-1])
        params["delta"] = eps
        return _report("k-entry", [ranking], [1], [_row(ranking, by_position)], w, limit, params)

    params["construction_limit"] = (2 * n_active - k_active) / k_active
    kp = sorted(remaining)
    free = [p for p in range(1, n_active + 1) if p not in remaining]
    types = list(itertools.permutations(range(n_active), k_active))
    t = len(types)
    params["types"] = t

    def complete(sigma, last=None):
        ranking = [None] * n_active
        for p, c in zip(kp, sigma):
            ranking[p - 1] = c
        rest = [c for c in range(n_active) if c not in sigma and c != last]
        slots = [p for p in free if not (last is not None and p == n_active)]
        for p, c in zip(slots, rest):
            ranking[p - 1] = c
        if last is not None:
            ranking[n_active - 1] = last
        return tuple(ranking) + suffix

    rankings = [complete(sigma) for sigma in types]
    weights = [Fraction(1, t)] * t
    w = _query(rule, rankings, weights)
    if w >= n_active:
        rows = _sacrificed_winner_rows(rankings, n_active, n, eps)
        return _report("k-entry", rankings, weights, rows, w, limit, params)

    final, blocks = [], []
    for sigma in types:
        if w in sigma:
            ranking = complete(sigma)
            block = [HALF + eps + off[p] for p in range(1, n_active + 1)]
        else:
            ranking = complete(sigma, last=w)
            block = [eps + off[p] for p in range(1, n_active)] + [Fraction(1)]
        final.append(ranking)
        blocks.append(block)
    largest = max(max(b) for b in blocks)
    far = _far_suffix(n_active, n, largest)
    rows = [_row(r, b + far) for r, b in zip(final, blocks)]
    params["winner_in_types"] = sum(1 for sigma in types if w in sigma)
    if far:
        params["far_distances"] = far
    return _report("k-entry", final, weights, rows, w, limit, params)


# ----------------------------------------------------------------- unbounded


def gen_unbounded_adversary(rule: BoundedRule, delta=Fraction(1, 10**3)) -> AdversaryReport | None:
    """Exploit a message that hides the voter's top choice.

    Every voter sends that message. If the rule picks the top of one
    ranking in the class, the voters are placed at ``delta`` from the top of
    the other ranking; otherwise at ``delta`` from the first ranking's top.
    The ratio grows like 1/delta. Returns None when every message pins the
    top choice.
    """
    found = has_ambiguous_top(rule.partition)
    if found is None:
        return None
    delta = _exact(delta)
    if not 0 < delta < 1:
        raise BadEpsilon("delta must lie in (0, 1)")
    message, first, second = found
    n = rule.partition.n
    w = _query(rule, [first], [1])
    ranking = second if w == first[0] else first
    rows = _single_top_rows(ranking, delta)
    params = {"delta": delta, "family_target": 1 / delta, "message": message, "rankings": [list(first), list(second)]}
    return _report("unbounded", [ranking], [1], rows, w, INF, params)


# ------------------------------------------------------------------- general


def gamma_of(n: int, beta) -> float:
    """1 - beta^(-1/(n-2))."""
    if n < 3:
        raise BadN(f"n={n} must be at least 3")
    if beta < 1:
        raise BadParams("beta must be at least 1")
    return 1 - beta ** (-1 / (n - 2))


def taylor_bound(n: int, beta) -> float:
    """(2n - 4)/ln(beta) - 1, the closed-form bound implied by gamma <= ln(beta)/(n-2)."""
    return float("inf") if beta == 1 else (2 * n - 4) / math.log(beta) - 1


def gen_general_adversary(
    rule: BoundedRule, n: int, beta: int, epsilon=Fraction(1, 10**5)
) -> AdversaryReport:
    """Inductive construction against any beta-message rule.

    While some remaining candidate can be put last by the rankings of fewer
    than a (1 - gamma) fraction of the live messages, that candidate is
    sacrificed (fixed in the last open position) and the live rankings
    shrink. Otherwise one voter per live message forces ratio at least
    2/gamma - 1: voters whose message allows the winner last sit on top of
    the other candidates, the rest halfway between.
    """
    partition = rule.partition
    if partition.n != n:
        raise BadParams(f"rule partition has n={partition.n}, not {n}")
    if partition.beta != beta:
        raise BadParams(f"rule partition has beta={partition.beta}, not {beta}")
    gamma = gamma_of(n, beta)
    eps = _exact(epsilon)
    if not 0 < eps < Fraction(1, 8):
        raise BadEpsilon(f"epsilon={epsilon} must lie in (0, 1/8)")
    keep = 1 - gamma
    bound = 2 / gamma - 1 if gamma > 0 else float("inf")
    limit = INF if beta == 1 else max(bound, taylor_bound(n, beta))
    off = _offsets(eps, n)
    rankings_all = all_rankings(n)
    active = list(range(n))
    suffix: tuple[int, ...] = ()
    trace = []
    params = {
        "epsilon": eps,
        "gamma": gamma,
        "two_over_gamma_minus_one": bound,
        "taylor_bound": taylor_bound(n, beta),
        "trace": trace,
    }
    if limit is INF:
        # a single message: the family's members reach 1/(2 eps)
        params["family_target"] = 1 / (2 * eps)

    while True:
        na = len(active)
        classes: dict[int, list[tuple[int, ...]]] = {}
        for r, label in zip(rankings_all, partition.labels):
            if r[na:] == suffix:
                classes.setdefault(label, []).append(r)
        L = len(classes)
        if na == 2 and L == 1:
            # two remaining orders in one message: the top choice is hidden
            (members,) = classes.values()
            w = _query(rule, [members[0]], [1])
            trace.append({"remaining": na, "live_messages": 1, "case": "hidden-top"})
            if w in suffix:
                rows = _sacrificed_winner_rows([members[0]], na, n, eps)
                return _report("general", [members[0]], [1], rows, w, limit, params)
            ranking = next(r for r in members if r[0] != w)
            by_position = [eps] + [1 + off[p] for p in range(2, n + 1)]
            return _report("general", [ranking], [1], [_row(ranking, by_position)], w, limit, params)

        counts = {x: sum(1 for rs in classes.values() if any(r[na - 1] == x for r in rs)) for x in active}
        step = {"remaining": na, "live_messages": L, "last_counts": dict(counts)}
        short = [x for x in active if counts[x] < keep * L * (1 - 1e-12)]
        if short:
            x = min(short, key=lambda c: (counts[c], c))
            step.update(case="sacrifice", candidate=x)
            trace.append(step)
            active.remove(x)
            suffix = (x,) + suffix
            continue

        labels = sorted(classes)
        weights = [Fraction(1, L)] * L
        w = _query(rule, [classes[j][0] for j in labels], weights)
        step.update(case="direct", winner=w)
        trace.append(step)
        if w in suffix:
            rows = _sacrificed_winner_rows([classes[j][0] for j in labels], na, n, eps)
            return _report("general", [classes[j][0] for j in labels], weights, rows, w, limit, params)
        tail = [1 + off[p] for p in range(na + 1, n + 1)]
        final, rows, hits = [], [], 0
        for j in labels:
            last_w = [r for r in classes[j] if r[na - 1] == w]
            if last_w:
                hits += 1
                ranking = last_w[0]
                block = [eps + off[p] for p in range(1, na)] + [Fraction(1)]
            else:
                ranking = classes[j][0]
                block = [HALF + eps + off[p] for p in range(1, na + 1)]
            final.append(ranking)
            rows.append(_row(ranking, block + tail))
        step.update(winner_last_messages=hits, fraction=Fraction(hits, L))
        return _report("general", final, weights, rows, w, limit, params)
