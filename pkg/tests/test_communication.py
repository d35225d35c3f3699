import itertools
import math

import pytest

from conftest import random_profile
from mvd.communication import (
    MessagePartition,
    all_rankings,
    apply_bounded_rule,
    block_partition,
    constant_rule,
    full_information_partition,
    has_ambiguous_top,
    hashed_rule,
    is_generated_by,
    k_entry_partition,
    lex_index,
    merged_top_partition,
    message_of,
    message_weights,
    partition_from_key,
    plurality_on_messages,
    wrap_full_rule,
)
from mvd.core import VoteProfile
from mvd.errors import BadPositions, EnumerationCap, ParseError
from mvd.rules import plurality, topk_copeland


def test_k_entry_beta():
    assert k_entry_partition(4, [1]).beta == 4
    assert k_entry_partition(4, [1, 2]).beta == 12
    full = k_entry_partition(4, [1, 2, 3, 4])
    assert full.beta == 24 and all(len(c) == 1 for c in full.classes().values())
    for n, k in ((5, 2), (5, 3), (6, 1)):
        assert k_entry_partition(n, range(1, k + 1)).beta == math.factorial(n) // math.factorial(n - k)


def test_k_entry_ids_are_lexicographic_rank_of_assignment():
    part = k_entry_partition(4, [2, 4])
    order = list(itertools.permutations(range(4), 2))
    for r in all_rankings(4):
        assert part.message_of(r) == order.index((r[1], r[3])) + 1


def test_bad_positions():
    with pytest.raises(BadPositions):
        k_entry_partition(3, [0])
    with pytest.raises(BadPositions):
        k_entry_partition(3, [4])


def test_message_of_examples():
    part = k_entry_partition(4, [1])
    assert message_of(part, (2, 0, 1, 3)) == message_of(part, (2, 3, 1, 0))
    assert message_of(part, (2, 0, 1, 3)) != message_of(part, (1, 0, 2, 3))
    full = full_information_partition(4)
    assert len({message_of(full, r) for r in all_rankings(4)}) == 24


def test_lex_index_is_position():
    for n in (1, 3, 5):
        for i, r in enumerate(all_rankings(n)):
            assert lex_index(r) == i


def test_enumeration_cap():
    with pytest.raises(EnumerationCap):
        all_rankings(9)


def test_partition_invariants():
    with pytest.raises(ValueError):
        MessagePartition(3, (1, 1, 1, 1, 1, 3))  # id 2 unused
    with pytest.raises(ValueError):
        MessagePartition(3, (1, 2))
    for n in (3, 4):
        for beta in (1, 2, 5, math.factorial(n)):
            part = block_partition(n, beta)
            assert part.beta == beta
            classes = part.classes()
            assert sum(len(c) for c in classes.values()) == math.factorial(n)
            for j, members in classes.items():
                assert all(part.message_of(r) == j for r in members)


def test_partition_json_round_trip():
    part = k_entry_partition(4, [1, 3])
    text = part.to_json()
    assert MessagePartition.from_json(text) == part
    assert MessagePartition.from_json(text).to_json() == text
    with pytest.raises(ParseError):
        MessagePartition.from_json('{"n": 3}')
    with pytest.raises(ParseError):
        MessagePartition.from_json("not json")


def test_ambiguous_top_examples():
    assert has_ambiguous_top(k_entry_partition(4, [1])) is None
    assert has_ambiguous_top(k_entry_partition(4, [1, 3])) is None
    assert has_ambiguous_top(k_entry_partition(3, [3])) is not None
    message, a, b = has_ambiguous_top(merged_top_partition(3))
    assert {a, b} == {(0, 1, 2), (1, 0, 2)}
    assert message == merged_top_partition(3).message_of((0, 1, 2))
    assert has_ambiguous_top(full_information_partition(4)) is None


def test_is_generated_by():
    assert is_generated_by(k_entry_partition(4, [1, 2]), [1, 2, 3])
    assert not is_generated_by(k_entry_partition(4, [1, 2]), [1])
    assert is_generated_by(partition_from_key(4, lambda r: 0), [])


def test_bounded_plurality_agrees_with_plurality(rng):
    for n in (2, 3, 4):
        rule = wrap_full_rule(k_entry_partition(n, [1]), plurality)
        pom = plurality_on_messages(k_entry_partition(n, [1]))
        for _ in range(60):
            p = random_profile(rng, n, rng.randint(1, 6))
            assert apply_bounded_rule(rule, p) == plurality(p)
            assert apply_bounded_rule(pom, p) == plurality(p)


def test_wrapped_topk_copeland_agrees_on_enumerated_profiles():
    n, k = 3, 2
    rule = wrap_full_rule(k_entry_partition(n, range(1, k + 1)), lambda p: topk_copeland(p, k))
    for m in (1, 2, 3):
        for combo in itertools.combinations_with_replacement(all_rankings(n), m):
            p = VoteProfile.from_rankings(combo)
            assert apply_bounded_rule(rule, p) == topk_copeland(p, k)


def test_constant_rule():
    rule = constant_rule(block_partition(3, 2), 2)
    assert apply_bounded_rule(rule, VoteProfile.from_rankings([(0, 1, 2)])) == 2


def test_rule_invariant_within_a_class(rng):
    part = block_partition(4, 5)
    rules = [plurality_on_messages(part), hashed_rule(part, 7)]
    classes = part.classes()
    for _ in range(100):
        p = random_profile(rng, 4, rng.randint(1, 5))
        swapped = VoteProfile.from_rankings(
            [rng.choice(classes[part.message_of(r)]) for r in p.rankings], p.weights
        )
        assert message_weights(part, p) == message_weights(part, swapped)
        for rule in rules:
            assert apply_bounded_rule(rule, p) == apply_bounded_rule(rule, swapped)


def test_k_entry_relabeling_permutes_message_ids(rng):
    part = k_entry_partition(4, [1, 3])
    for _ in range(20):
        perm = list(range(4))
        rng.shuffle(perm)
        mapping = {}
        for r in all_rankings(4):
            moved = tuple(perm[c] for c in r)
            mapping.setdefault(part.message_of(r), set()).add(part.message_of(moved))
        assert all(len(v) == 1 for v in mapping.values())
        assert len({next(iter(v)) for v in mapping.values()}) == part.beta
