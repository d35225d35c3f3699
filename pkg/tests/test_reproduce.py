import csv
import io

import pytest

from mvd.errors import BadParams, CapExceeded
from mvd.metric import INF
from mvd.reproduce import (
    FIELDS,
    ResultRow,
    argmax_f,
    bounds_table,
    lemmas_table,
    parse_range,
    randomized_table,
    rows_to_csv,
    unit_profiles,
)


def test_parse_range():
    assert parse_range("4") == [4]
    assert parse_range("2..5") == [2, 3, 4, 5]
    assert parse_range("1,3") == [1, 3]
    assert parse_range("1..2,6") == [1, 2, 6]
    for bad in ("", "a", "1..", "2..x"):
        with pytest.raises(BadParams):
            parse_range(bad)


def test_bounds_n4_k1():
    rows = bounds_table([4], [1], samples=2)
    assert [r.claim for r in rows] == ["lower", "upper-79n/k", "upper-1+26/alpha"]
    lower, upper79, upper26 = rows
    assert lower.bound == 7 and 7 - 0.01 <= lower.value <= 7
    # the adversary instance itself is in the upper-bound pool
    assert upper79.value >= lower.value - 1e-6
    assert upper79.bound == 316 and upper26.bound == 313
    assert all(r.holds for r in rows)


def test_bounds_skips_k_out_of_range():
    assert bounds_table([3], [3, 4], samples=0) == []
    with pytest.raises(CapExceeded):
        bounds_table([8], [1])


def test_randomized_n3():
    rows = {r.rule: r for r in randomized_table([3], max_voters=3)}
    assert rows["mixed"].value <= 3 - 2 / 3 + 1e-6 and rows["mixed"].holds
    assert rows["random-dictatorship"].value < 3 and rows["random-dictatorship"].holds
    assert rows["random-oligarchy"].holds is None


def test_randomized_n2_reaches_two():
    mixed = randomized_table([2], max_voters=4)[0]
    assert abs(mixed.value - 2) < 0.05


def test_unit_profile_counts():
    assert sum(1 for _ in unit_profiles(3, 4)) == 6 + 21 + 56 + 126
    with pytest.raises(CapExceeded):
        next(unit_profiles(3, 7))


def test_lemmas_hold_for_small_n():
    rows = lemmas_table(range(2, 11))
    assert len(rows) == 18 and all(r.holds for r in rows)
    for n in (2, 3, 5, 10):
        assert abs(argmax_f(n) - 1 / n) <= 2e-4
    with pytest.raises(BadParams):
        lemmas_table([3], step=0)


def test_csv_round_trip():
    rows = [
        ResultRow("x", 3, 1, "lower", 2.5, 3.0, False, 1.25),
        ResultRow("y", 3, 1, "upper", INF, 3.0, False, 0.0),
        ResultRow("z", 3, 1, "reference", 1.0, 3.0, None, 0.0),
    ]
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert tuple(parsed[0]) == FIELDS
    assert [r["holds"] for r in parsed] == ["no", "no", "n/a"]
    assert parsed[0]["slack"] == "0.5" and parsed[1]["value"] == "inf" and parsed[1]["slack"] == "-inf"
    assert "\r" not in text
