"""Reproduction tables: lower bounds, upper bounds and the technical lemma.

Every table is a list of :class:`ResultRow`. ``slack`` is always
``bound - value``; whether a positive or negative slack is good depends on
the claim, so each row also carries ``holds``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from dataclasses import dataclass

from .adversary import gen_k_entry_adversary
from .communication import all_rankings, k_entry_partition, wrap_full_rule
from .core import VoteProfile
from .errors import BadParams, CapExceeded
from .lp import distortion_of, rule_distortion
from .metric import INF
from .rules import (
    mixed_mechanism,
    random_dictatorship,
    random_oligarchy,
    technical_bound_f,
    technical_bound_g,
    topk_copeland,
)
from .sampling import sample_instance

MAX_LP_N = 7
MAX_VOTERS = 6
LOWER_SLACK = 0.01
UPPER_TOL = 1e-6

FIELDS = ("rule", "n", "k_or_beta", "claim", "value", "bound", "slack", "holds", "runtime_ms")


@dataclass(frozen=True)
class ResultRow:
    rule: str
    n: int
    k_or_beta: int
    claim: str
    value: object  # float or INF
    bound: float
    holds: bool | None  # None for purely informational rows
    runtime_ms: float

    @property
    def slack(self):
        if self.value is INF:
            return -math.inf
        return self.bound - float(self.value)

    def as_record(self) -> dict:
        return {
            "rule": self.rule,
            "n": self.n,
            "k_or_beta": self.k_or_beta,
            "claim": self.claim,
            "value": "inf" if self.value is INF else f"{float(self.value):.9g}",
            "bound": f"{self.bound:.9g}",
            "slack": "-inf" if self.value is INF else f"{self.slack:.9g}",
            "holds": {True: "yes", False: "no", None: "n/a"}[self.holds],
            "runtime_ms": f"{self.runtime_ms:.1f}",
        }


def parse_range(text: str) -> list[int]:
    """``"4"`` -> [4], ``"2..5"`` -> [2, 3, 4, 5], ``"1,3"`` -> [1, 3]."""
    out: list[int] = []
    try:
        for part in text.split(","):
            lo, sep, hi = part.partition("..")
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    except ValueError:
        raise BadParams(f"bad integer range {text!r}") from None
    return out


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()


def _millis(start: float) -> float:
    return (time.perf_counter() - start) * 1000


# ----------------------------------------------------------------- bounds


def bounds_table(ns, ks, samples: int = 5, voters: int = 6, seed: int = 0, epsilon=1e-5) -> list[ResultRow]:
    rows = []
    for n, k in itertools.product(ns, ks):
        if not 1 <= k < n:
            continue
        if n > MAX_LP_N:
            raise CapExceeded(f"bounds table supports n <= {MAX_LP_N}, got n={n}")
        name = f"topk-copeland:k={k}"
        start = time.perf_counter()
        rule = wrap_full_rule(k_entry_partition(n, range(1, k + 1)), lambda p, k=k: topk_copeland(p, k), name)
        report = gen_k_entry_adversary(rule, n, range(1, k + 1), epsilon)
        lower = (2 * n - k) / k
        rows.append(ResultRow(name, n, k, "lower", report.certified_ratio, lower, report.holds(LOWER_SLACK), _millis(start)))

        start = time.perf_counter()
        profiles = [report.instance.profile]
        profiles += [sample_instance(seed + i, n, voters).profile for i in range(samples)]
        worst = max((rule_distortion(name, p).value for p in profiles), key=float)
        elapsed = _millis(start)
        for claim, bound in (("upper-79n/k", 79 * n / k), ("upper-1+26/alpha", 1 + 78 * n / k)):
            rows.append(ResultRow(name, n, k, claim, worst, bound, float(worst) <= bound + UPPER_TOL, elapsed))
    return rows


# ------------------------------------------------------------- randomized


def unit_profiles(n: int, max_voters: int):
    """All multisets of 1..max_voters rankings, as unit-weight profiles."""
    if n > MAX_LP_N or max_voters > MAX_VOTERS:
        raise CapExceeded(f"enumeration supports n <= {MAX_LP_N} and at most {MAX_VOTERS} voters")
    for m in range(1, max_voters + 1):
        for combo in itertools.combinations_with_replacement(all_rankings(n), m):
            yield VoteProfile.from_rankings(combo)


def randomized_table(ns, max_voters: int = 4) -> list[ResultRow]:
    rows = []
    for n in ns:
        if n < 2:
            raise BadParams("the mixed mechanism needs n >= 2")
        profiles = list(unit_profiles(n, max_voters))
        for name, rule, bound, claim in (
            ("mixed", mixed_mechanism, 3 - 2 / n, "upper"),
            ("random-dictatorship", random_dictatorship, 3.0, "strict-upper"),
            ("random-oligarchy", random_oligarchy, 3 - 2 / n, "reference"),
        ):
            start = time.perf_counter()
            worst = max((distortion_of(p, rule(p)) for p in profiles), key=float)
            if claim == "upper":
                holds = float(worst) <= bound + UPPER_TOL
            elif claim == "strict-upper":
                holds = float(worst) < bound
            else:
                holds = None
            rows.append(ResultRow(name, n, max_voters, claim, worst, bound, holds, _millis(start)))
    return rows


# ----------------------------------------------------------------- lemmas


def lemma_grid(step: float) -> list[float]:
    count = round(1 / step)
    return [i / count for i in range(count + 1)]


def lemmas_table(ns, step: float = 1e-4) -> list[ResultRow]:
    if not 0 < step <= 0.5:
        raise BadParams("step must lie in (0, 1/2]")
    grid = lemma_grid(step)
    rows = []
    for n in ns:
        start = time.perf_counter()
        f_max = max(technical_bound_f(t, n) for t in grid)
        rows.append(ResultRow("technical-f", n, 0, "max", f_max, 1 - 1 / n, f_max <= 1 - 1 / n + 1e-9, _millis(start)))
        start = time.perf_counter()
        g_min = min(technical_bound_g(t, n) for t in grid)
        bound = (n - 1) / n
        # for g the bound is a floor, so the claim holds when slack <= tolerance
        rows.append(ResultRow("technical-g", n, 0, "min", g_min, bound, g_min >= bound - 1e-12, _millis(start)))
    return rows


def argmax_f(n: int, step: float = 1e-4) -> float:
    grid = lemma_grid(step)
    return max(grid, key=lambda t: technical_bound_f(t, n))


