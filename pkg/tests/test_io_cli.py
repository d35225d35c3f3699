import csv
import io
import json
from fractions import Fraction

import pytest

from conftest import random_profile
from mvd.cli import main
from mvd.core import Instance, Metric
from mvd.errors import ParseError
from mvd.io import dump_instance, format_rational, load_instance, parse_rational
from mvd.lp import rule_distortion
from mvd.sampling import sample_instance

MAJORITY = {"n": 2, "ballots": [{"weight": "1/1", "ranking": [0, 1]}] * 2 + [{"weight": "1/1", "ranking": [1, 0]}]}


def write(tmp_path, doc, name="inst.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


# ------------------------------------------------------------------ formats


def test_rationals():
    assert format_rational(Fraction(3, 6)) == "1/2"
    assert parse_rational("2/4") == Fraction(1, 2)
    assert parse_rational("0.25") == Fraction(1, 4)
    for bad in ("1/0", "abc", "", None, 1.5):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_instance_round_trip_is_byte_identical(rng):
    for _ in range(100):
        n = rng.randint(2, 5)
        p = random_profile(rng, n, rng.randint(1, 5))
        rows = tuple(tuple(Fraction(rng.randint(0, 9), rng.randint(1, 4)) for _ in range(n)) for _ in p.ballots)
        for inst in (Instance(p), Instance(p, Metric(rows))):
            text = dump_instance(inst)
            again = load_instance(text)
            assert again == inst
            assert dump_instance(again) == text


def test_float_metric_uses_twelve_digits():
    p = sample_instance(3, 2, 1).profile
    text = dump_instance(Instance(p, Metric(((1 / 3, 2 / 3),))))
    assert '"0.333333333333"' in text
    assert dump_instance(load_instance(text)) == text


def test_load_errors():
    for text in ("[1]", "{", '{"n": 2}', '{"n": "2", "ballots": []}', '{"n": 2, "ballots": [{"weight": "1/1"}]}'):
        with pytest.raises(ParseError):
            load_instance(text)


# ---------------------------------------------------------------------- cli


def test_validate_exit_codes(tmp_path, capsys):
    good = dict(MAJORITY, metric={"rows": [["1/2", "1/2"], ["1/2", "1/2"], ["1/1", "0/1"]]})
    assert run(capsys, "validate", write(tmp_path, good))[0] == 0
    quad = {"n": 2, "ballots": [{"weight": "1/1", "ranking": [1, 0]}, {"weight": "1/1", "ranking": [0, 1]}],
            "metric": {"rows": [["3/1", "0/1"], ["0/1", "0/1"]]}}
    code, out = run(capsys, "validate", write(tmp_path, quad))
    assert code == 1 and json.loads(out)["violations"]
    bad = {"n": 2, "ballots": [{"weight": "1/0", "ranking": [0, 1]}]}
    assert run(capsys, "validate", write(tmp_path, bad))[0] == 2
    not_perm = {"n": 2, "ballots": [{"weight": "1/1", "ranking": [0, 0]}]}
    code, out = run(capsys, "validate", write(tmp_path, not_perm))
    assert code == 1 and json.loads(out)["errors"]
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 2


def test_rule_run(tmp_path, capsys):
    nu = {"n": 3, "ballots": [{"weight": "2/3", "ranking": [0, 1, 2]}, {"weight": "1/3", "ranking": [1, 0, 2]}]}
    code, out = run(capsys, "rule", "run", "--rule", "mixed", write(tmp_path, nu))
    assert code == 0 and json.loads(out)["distribution"] == ["11/15", "4/15", "0/1"]
    unanimous = {"n": 3, "ballots": [{"weight": "1/1", "ranking": [0, 2, 1]}] * 4}
    assert json.loads(run(capsys, "rule", "run", "--rule", "plurality", write(tmp_path, unanimous))[1])["winner"] == 0
    code, out = run(capsys, "rule", "run", "--rule", "topk-copeland:k=2", "--emit-graph", write(tmp_path, nu))
    graph = json.loads(out)["graph"]
    assert graph["alpha"] == "2/9" and [0, 1] in graph["edges"]
    assert run(capsys, "rule", "run", "--rule", "borda", write(tmp_path, nu))[0] == 2
    assert run(capsys, "rule", "run", "--rule", "topk-copeland:k=x", write(tmp_path, nu))[0] == 2


def test_distortion_command(tmp_path, capsys):
    code, out = run(capsys, "distortion", "--rule", "plurality", write(tmp_path, MAJORITY))
    doc = json.loads(out)
    assert code == 0 and abs(doc["distortion"] - 2) < 1e-6
    assert len(doc["witness_metric"]["rows"]) == 3
    sample = dump_instance(sample_instance(17, 4, 5))
    doc = json.loads(run(capsys, "distortion", "--rule", "copeland", write(tmp_path, sample))[1])
    assert doc["distortion"] <= 5 + 1e-6
    hidden = {"n": 3, "ballots": [{"weight": "1/1", "ranking": [1, 0, 2]}]}
    doc = json.loads(run(capsys, "distortion", "--rule", "constant:c=0", write(tmp_path, hidden))[1])
    assert doc["distortion"] == "inf" and "witness_metric" not in doc


def test_distortion_matches_library(tmp_path, capsys, rng):
    p = random_profile(rng, 3, 4)
    doc = json.loads(run(capsys, "distortion", "--rule", "mixed", write(tmp_path, dump_instance(Instance(p))))[1])
    assert doc["distortion"] == pytest.approx(rule_distortion("mixed", p).value)


def test_adversary_commands(tmp_path, capsys):
    report_path, inst_path = tmp_path / "r.json", tmp_path / "i.json"
    code, out = run(
        capsys, "adversary", "k-entry", "--n", "5", "--positions", "1", "--epsilon", "1e-5",
        "--rule", "plurality", "--out-report", str(report_path), "--out-instance", str(inst_path),
    )
    doc = json.loads(out)
    assert code == 0 and doc["certified_ratio"] >= 8.99
    assert json.loads(report_path.read_text()) == doc
    inst = load_instance(inst_path.read_text())
    assert dump_instance(inst) == inst_path.read_text()
    assert run(capsys, "validate", str(inst_path))[0] == 0

    code, out = run(capsys, "adversary", "general", "--n", "4", "--beta", "4", "--rule", "plurality-on-messages")
    assert code == 0 and json.loads(out)["certified_ratio"] >= 2.99
    code, out = run(capsys, "adversary", "unbounded", "--n", "4", "--rule", "plurality-on-messages")
    assert code == 0 and json.loads(out)["certified_ratio"] >= 999


def test_adversary_claim_and_input_failures(capsys):
    # k >= n/2: the explicit construction cannot certify (2n-k)/k, reported as exit 1
    assert run(capsys, "adversary", "k-entry", "--n", "3", "--positions", "2,3", "--rule", "constant:c=0")[0] == 1
    assert run(capsys, "adversary", "k-entry", "--n", "4", "--positions", "2", "--rule", "plurality")[0] == 2
    assert run(capsys, "adversary", "general", "--n", "4", "--rule", "plurality-on-messages")[0] == 2
    assert run(capsys, "adversary", "general", "--n", "4", "--beta", "4", "--rule", "mixed")[0] == 2
    assert run(capsys, "adversary", "k-entry", "--n", "4", "--epsilon", "0.5", "--rule", "plurality")[0] == 2


def test_sample_command(capsys):
    code, out = run(capsys, "sample", "--seed", "7", "--n", "3", "--m", "2")
    assert code == 0 and load_instance(out) == sample_instance(7, 3, 2)
    assert run(capsys, "sample", "--seed", "7", "--n", "9", "--m", "2")[0] == 2


def test_reproduce_commands(tmp_path, capsys):
    out_path = tmp_path / "lemmas.csv"
    code, out = run(capsys, "reproduce", "lemmas", "--n", "2..5", "--step", "1e-3", "--out", str(out_path))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 8 and out_path.read_text() == out
    assert all(r["holds"] == "yes" for r in rows)
    assert run(capsys, "reproduce", "bounds", "--n", "9", "--k", "1")[0] == 2
    assert run(capsys, "reproduce", "randomized", "--n", "3", "--max-voters", "9")[0] == 2
    assert run(capsys, "reproduce", "lemmas", "--n", "two")[0] == 2


def test_bad_flags_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["adversary", "sideways", "--rule", "plurality"])
    assert exc.value.code == 2
    capsys.readouterr()
