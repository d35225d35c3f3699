"""JSON formats for instances, reports and distributions.

Instance files look like::

    {
      "n": 3,
      "ballots": [{"weight": "1/2", "ranking": [0, 1, 2]}, ...],
      "metric": {"rows": [["1/4", "1/2", "1/1"], ...]}
    }

Weights are exact ``"p/q"`` strings. Metric entries are ``"p/q"`` for exact
metrics and 12-significant-digit decimals for float metrics; decimals are
read back as exact rationals. :func:`dump_instance` is canonical, so
parse-then-dump reproduces a canonical file byte for byte.
"""

from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational

from .adversary import AdversaryReport
from .core import CandidateDistribution, Instance, Metric, VoteProfile, WeightedBallot
from .errors import ParseError
from .metric import INF


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed rational {text!r}") from exc


def format_distance(value) -> str:
    if isinstance(value, Rational):
        return format_rational(value)
    return format(float(value), ".12g")


def format_real(value):
    """JSON-friendly real: floats stay floats, INF becomes "inf"."""
    if value is INF:
        return "inf"
    return float(value)


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        "n": instance.profile.n,
        "ballots": [
            {"weight": format_rational(b.weight), "ranking": list(b.ranking)}
            for b in instance.profile.ballots
        ],
    }
    if instance.metric is not None:
        doc["metric"] = {"rows": [[format_distance(d) for d in row] for row in instance.metric.rows]}
    return doc


def dump_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def read_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    return doc


def _is_decimal(text) -> bool:
    return isinstance(text, str) and "/" not in text and any(ch in text for ch in ".eE")


def _parse_rows(rows):
    """Rational entries give an exact metric; any decimal entry makes the whole matrix float."""
    exact = [[parse_rational(d) for d in row] for row in rows]
    if any(_is_decimal(d) for row in rows for d in row):
        return [[float(d) for d in row] for row in exact]
    return exact


def raw_fields(doc: dict):
    """Syntactic decoding only: (n, [(ranking, weight)], metric rows or None)."""
    try:
        n = doc["n"]
        ballots = doc["ballots"]
        if not isinstance(n, int) or not isinstance(ballots, list):
            raise ParseError("'n' must be an integer and 'ballots' a list")
        parsed = []
        for b in ballots:
            ranking = b["ranking"]
            if not isinstance(ranking, list) or not all(isinstance(c, int) for c in ranking):
                raise ParseError(f"ranking {ranking!r} must be a list of integers")
            parsed.append((tuple(ranking), parse_rational(b["weight"])))
        rows = None
        if doc.get("metric") is not None:
            rows = _parse_rows(doc["metric"]["rows"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from exc
    return n, parsed, rows


def instance_from_dict(doc: dict) -> Instance:
    n, ballots, rows = raw_fields(doc)
    profile = VoteProfile(n, tuple(WeightedBallot(r, w) for r, w in ballots))
    return Instance(profile, None if rows is None else Metric(tuple(tuple(r) for r in rows)))


def load_instance(text: str) -> Instance:
    return instance_from_dict(read_document(text))


def distribution_to_list(dist: CandidateDistribution) -> list[str]:
    return [format_rational(p) for p in dist.probs]


def _jsonable(value):
    if value is INF:
        return "inf"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_to_dict(report: AdversaryReport, slack: float = 0.01) -> dict:
    ratio = report.certified_ratio
    return {
        "kind": report.kind,
        "winner": report.winner,
        "certified_ratio": format_real(ratio),
        "certified_ratio_exact": _jsonable(ratio),
        "theoretical_limit": format_real(report.theoretical_limit),
        "holds": report.holds(slack),
        "parameters": _jsonable(report.parameters),
        "instance": instance_to_dict(report.instance),
    }
