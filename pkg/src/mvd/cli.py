"""``mvd`` command line.

Exit codes: 0 success or claims hold, 1 a claim or validation failed,
2 bad input (unreadable file, malformed rational, unknown rule, bad flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as mvd_io
from .adversary import gen_general_adversary, gen_k_entry_adversary, gen_unbounded_adversary
from .communication import (
    BoundedRule,
    MessagePartition,
    block_partition,
    check_positions,
    constant_rule,
    k_entry_partition,
    merged_top_partition,
    plurality_on_messages,
    wrap_full_rule,
)
from .core import CandidateDistribution, Instance, Metric, VoteProfile, WeightedBallot
from .errors import BadParams, MvdError, NotKEntry, ParseError
from .lp import rule_distortion
from .metric import INF, is_consistent, validate_metric
from .reproduce import bounds_table, lemmas_table, parse_range, randomized_table, rows_to_csv
from .rules import (
    RuleSpec,
    frequent_set,
    parse_rule,
    plurality,
    run_rule,
    topk_copeland,
    topk_copeland_with_graph,
)
from .sampling import sample_instance

EXIT_OK, EXIT_CLAIM, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(doc, out: str | None = None):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load(path: str) -> Instance:
    return mvd_io.load_instance(_read(path))


# --------------------------------------------------------------- validate


def cmd_validate(args) -> int:
    n, ballots, rows = mvd_io.raw_fields(mvd_io.read_document(_read(args.file)))
    report = {"ok": True, "errors": [], "violations": [], "consistent": None}
    try:
        profile = VoteProfile(n, tuple(WeightedBallot(r, w) for r, w in ballots))
        if rows is not None:
            instance = Instance(profile, Metric(tuple(tuple(r) for r in rows)))
            violations = validate_metric(instance.metric, profile)
            report["violations"] = [
                {"v": v.v, "v_other": v.v_other, "x": v.x, "y": v.y, "slack": mvd_io.format_distance(v.slack)}
                for v in violations
            ]
            report["consistent"] = is_consistent(instance.metric, profile)
            report["ok"] = not violations and report["consistent"]
    except ValueError as exc:  # every profile or metric invariant error is a ValueError
        report["errors"].append(f"{type(exc).__name__}: {exc}")
        report["ok"] = False
    _emit(report)
    return EXIT_OK if report["ok"] else EXIT_CLAIM


# ------------------------------------------------------------ rule / dist


def _outcome_doc(outcome) -> dict:
    if isinstance(outcome, CandidateDistribution):
        return {"distribution": mvd_io.distribution_to_list(outcome)}
    return {"winner": outcome}


def cmd_rule_run(args) -> int:
    spec = parse_rule(args.rule)
    profile = _load(args.file).profile
    doc = {"rule": str(spec), **_outcome_doc(run_rule(spec, profile))}
    if args.emit_graph:
        if spec.name not in ("topk-copeland", "copeland"):
            raise BadParams("--emit-graph needs topk-copeland or copeland")
        k = spec.param("k") if spec.name == "topk-copeland" else profile.n
        _, graph = topk_copeland_with_graph(profile, k)
        doc["graph"] = {
            "k": graph.k,
            "alpha": mvd_io.format_rational(graph.alpha),
            "edges": sorted(list(e) for e in graph.edges),
            "s2": frequent_set(graph, 2),
            "s3": frequent_set(graph, 3),
        }
    _emit(doc)
    return EXIT_OK


def cmd_distortion(args) -> int:
    spec = parse_rule(args.rule)
    profile = _load(args.file).profile
    result = rule_distortion(spec, profile)
    outcome = result.distribution if spec.randomized else result.winner
    doc = {"rule": str(spec), **_outcome_doc(outcome), "distortion": mvd_io.format_real(result.value)}
    if result.value is not INF and result.witness is not None:
        doc["reference"] = result.reference
        doc["witness_metric"] = {
            "rows": [[format(float(d), ".12g") for d in row] for row in result.witness.rows]
        }
    _emit(doc)
    return EXIT_OK


# -------------------------------------------------------------- adversary


def _bounded_rule(spec: RuleSpec, partition: MessagePartition) -> BoundedRule:
    if spec.name == "plurality-on-messages":
        return plurality_on_messages(partition)
    if spec.name == "constant":
        c = spec.param("c")
        if not 0 <= c < partition.n:
            raise BadParams(f"constant candidate {c} outside 0..{partition.n - 1}")
        return constant_rule(partition, c)
    raise BadParams(f"rule {spec} cannot run on this message partition")


def _k_entry_rule(spec: RuleSpec, n: int, positions: tuple[int, ...]) -> BoundedRule:
    partition = k_entry_partition(n, positions)
    if spec.name == "plurality":
        needed = {1}
        rule = plurality
    elif spec.name == "topk-copeland":
        k = spec.param("k")
        needed = set(range(1, k + 1))
        rule = lambda p: topk_copeland(p, k)  # noqa: E731
    elif spec.name == "copeland":
        needed = set(range(1, n + 1))
        rule = lambda p: topk_copeland(p, n)  # noqa: E731
    else:
        return _bounded_rule(spec, partition)
    if not needed <= set(positions):
        raise NotKEntry(f"{spec} reads positions {sorted(needed)}, not covered by {list(positions)}")
    return wrap_full_rule(partition, rule, str(spec))


def cmd_adversary(args) -> int:
    spec = parse_rule(args.rule)
    if args.kind == "k-entry":
        positions = check_positions(args.n, parse_range(args.positions))
        rule = _k_entry_rule(spec, args.n, positions)
        report = gen_k_entry_adversary(rule, args.n, positions, args.epsilon)
    elif args.kind == "general":
        if args.beta is None:
            raise BadParams("general adversary needs --beta")
        rule = _bounded_rule(spec, block_partition(args.n, args.beta))
        report = gen_general_adversary(rule, args.n, args.beta, args.epsilon)
    else:
        rule = _bounded_rule(spec, merged_top_partition(args.n))
        report = gen_unbounded_adversary(rule, args.delta)
        if report is None:
            raise BadParams("partition pins every top choice; no unbounded family")
    doc = mvd_io.report_to_dict(report, args.slack)
    if args.out_instance:
        Path(args.out_instance).write_text(mvd_io.dump_instance(report.instance), encoding="utf-8")
    _emit(doc, args.out_report)
    return EXIT_OK if doc["holds"] else EXIT_CLAIM


# -------------------------------------------------------------- reproduce


def cmd_reproduce(args) -> int:
    ns = parse_range(args.n)
    if args.table == "bounds":
        rows = bounds_table(ns, parse_range(args.k), args.samples, args.voters, args.seed, args.epsilon)
    elif args.table == "randomized":
        rows = randomized_table(ns, args.max_voters)
    else:
        rows = lemmas_table(ns, args.step)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_CLAIM if any(r.holds is False for r in rows) else EXIT_OK


def cmd_sample(args) -> int:
    text = mvd_io.dump_instance(sample_instance(args.seed, args.n, args.m))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# ----------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvd", description="Metric-voting distortion toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check profile invariants and the metric")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    rule = sub.add_parser("rule", help="run a voting rule")
    rule_sub = rule.add_subparsers(dest="rule_command", required=True, parser_class=_Parser)
    p = rule_sub.add_parser("run")
    p.add_argument("--rule", required=True)
    p.add_argument("--emit-graph", action="store_true")
    p.add_argument("file")
    p.set_defaults(func=cmd_rule_run)

    p = sub.add_parser("distortion", help="worst-case distortion of a rule's outcome")
    p.add_argument("--rule", required=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("adversary", help="build a lower-bound instance against a rule")
    p.add_argument("kind", choices=["k-entry", "general", "unbounded"])
    p.add_argument("--rule", required=True, help="rule to attack, e.g. plurality or constant:c=0")
    p.add_argument("--n", type=int, default=4, help="number of candidates")
    p.add_argument("--positions", default="1", help="k-entry positions K, 1-based, comma separated")
    p.add_argument("--beta", type=int, help="message count for the general construction")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--delta", type=float, default=1e-3, help="closeness for the unbounded family")
    p.add_argument("--slack", type=float, default=0.01, help="allowed shortfall against the limit")
    p.add_argument("--out-report", help="also write the report JSON here")
    p.add_argument("--out-instance", help="write the constructed instance here")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("reproduce", help="emit a reproduction table as CSV")
    p.add_argument("table", choices=["bounds", "randomized", "lemmas"])
    p.add_argument("--n", default="4", help="candidate counts: 4, 2..6 or 3,5")
    p.add_argument("--k", default="1", help="top-k sizes for the bounds table")
    p.add_argument("--samples", type=int, default=5, help="random instances per (n, k) upper bound")
    p.add_argument("--voters", type=int, default=6, help="ballots per random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-voters", type=int, default=4, help="largest enumerated electorate")
    p.add_argument("--step", type=float, default=1e-4, help="grid step for the lemma table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("sample", help="draw a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, MvdError, ValueError) as exc:
        print(f"mvd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
