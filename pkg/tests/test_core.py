from fractions import Fraction

import pytest

from conftest import random_profile
from mvd.core import (
    CandidateDistribution,
    Instance,
    Metric,
    VoteProfile,
    first_place_shares,
    normalize_profile,
    top_k_view,
)
from mvd.errors import BadK, DimensionMismatch, ZeroTotalWeight


def test_normalize_exact_division():
    p = VoteProfile.from_rankings([(0, 1), (1, 0), (0, 1)], [1, 1, 2])
    assert normalize_profile(p).weights == (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))


def test_normalize_identity_and_zero_weight_kept():
    p = VoteProfile.from_rankings([(0, 1), (1, 0), (0, 1)], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
    assert normalize_profile(p) == p
    q = normalize_profile(VoteProfile.from_rankings([(0, 1), (1, 0)], [3, 0]))
    assert q.weights == (1, 0)
    assert len(q) == 2


def test_zero_total_weight_rejected():
    with pytest.raises(ZeroTotalWeight):
        VoteProfile.from_rankings([(0, 1)], [0])


def test_bad_rankings_and_weights():
    with pytest.raises(ValueError):
        VoteProfile.from_rankings([(0, 0)])
    long_ballots = VoteProfile.from_rankings([(0, 1, 2)]).ballots
    with pytest.raises(ValueError):
        VoteProfile(2, long_ballots)
    with pytest.raises(ValueError):
        VoteProfile.from_rankings([(0, 1)], [-1])


def test_first_place_shares_examples():
    p = VoteProfile.from_rankings([(0, 1), (0, 1), (1, 0)])
    assert first_place_shares(p) == (Fraction(2, 3), Fraction(1, 3))
    assert first_place_shares(VoteProfile.from_rankings([(0, 2, 1)] * 3)) == (1, 0, 0)
    sym = VoteProfile.from_rankings([(0, 1, 2), (1, 2, 0), (2, 0, 1)])
    assert first_place_shares(sym) == (Fraction(1, 3),) * 3


def test_top_k_view():
    assert top_k_view((2, 0, 1, 3), 2) == (2, 0)
    assert top_k_view((2, 0, 1, 3), 4) == (2, 0, 1, 3)
    assert top_k_view((2, 0, 1, 3), 1) == (2,)
    for k in (0, 5):
        with pytest.raises(BadK):
            top_k_view((2, 0, 1, 3), k)


def test_shares_equivariant_and_normalize_idempotent(rng):
    for _ in range(100):
        n = rng.randint(2, 5)
        p = random_profile(rng, n, rng.randint(1, 6))
        perm = list(range(n))
        rng.shuffle(perm)
        base = first_place_shares(p)
        moved = first_place_shares(p.relabel(perm))
        assert all(moved[perm[x]] == base[x] for x in range(n))
        assert sum(base) == 1
        once = normalize_profile(p)
        assert normalize_profile(once) == once


def test_instance_dimension_check():
    p = VoteProfile.from_rankings([(0, 1)])
    with pytest.raises(DimensionMismatch):
        Instance(p, Metric(((1, 1), (1, 1))))


def test_distribution_must_sum_to_one():
    with pytest.raises(ValueError):
        CandidateDistribution((Fraction(1, 2), Fraction(1, 3)))
    d = CandidateDistribution.point_mass(3, 1)
    assert d.support == (1,)
    assert d.relabel([2, 0, 1]).probs == (1, 0, 0)


def test_metric_exactness_flag():
    assert Metric(((Fraction(1, 2), 1),)).exact
    assert not Metric(((0.5, 1.0),)).exact
