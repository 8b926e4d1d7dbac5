import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzbell.core import DeterministicStrategy
from ghzbell.strategies import (
    BudgetExceeded,
    RegularArrangement,
    VacuousConstraint,
    count_all,
    count_regular,
    count_zero_sum_convolution,
    count_zero_sum_naive,
    enumerate_all,
    enumerate_regular,
    exhaustive_line_table,
    line_from_strategy,
    lines_from_table,
    regular_line_table,
    strategy_of,
)

from conftest import random_strategy


def vec(*rows):
    return DeterministicStrategy.from_vectors(rows)


@pytest.mark.parametrize(
    "s, m, expected",
    [
        (vec((1, 1, 1), (1, 1, 1)), 3, 3),
        (vec((1, 0, 0), (1, 0, 0)), 3, 1),
        (vec((1, 1, 0), (1, 1, 0), (1, 1, 0)), 3, 2),
    ],
)
def test_zero_sum_examples(s, m, expected):
    assert count_zero_sum_naive(s, m) == expected
    assert count_zero_sum_convolution(s, m) == expected


def test_zero_sum_all_plus_eight_parties():
    s = DeterministicStrategy(m=5, masks=(0b11111,) * 8)
    assert count_zero_sum_convolution(s, 5) == 5**7 == 78125


@pytest.mark.slow
def test_convolution_matches_naive_on_every_small_strategy():
    for n in range(2, 5):
        for m in range(2, 6):
            for s in enumerate_all(n, m):
                assert count_zero_sum_convolution(s, m) == count_zero_sum_naive(s, m), s


def test_convolution_matches_naive_on_random_strategies():
    rng = random.Random(7)
    for _ in range(10_000):
        n, m = rng.randint(2, 6), rng.randint(2, 8)
        s = random_strategy(rng, n, m, allow_empty=True)
        assert count_zero_sum_convolution(s, m) == count_zero_sum_naive(s, m), s


def _rotate(mask, m, k):
    k %= m
    return ((mask << k) | (mask >> (m - k))) & ((1 << m) - 1)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.integers(2, 8), st.randoms(use_true_random=False), st.integers(0, 7))
def test_opposite_shifts_preserve_zero_sum(n, m, rnd, k):
    s = random_strategy(rnd, n, m, allow_empty=True)
    i, j = rnd.sample(range(n), 2)
    masks = list(s.masks)
    masks[i] = _rotate(masks[i], m, k)
    masks[j] = _rotate(masks[j], m, -k)
    shifted = DeterministicStrategy(m=m, masks=tuple(masks))
    assert count_zero_sum_convolution(shifted, m) == count_zero_sum_convolution(s, m)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 7), min_size=2, max_size=6), st.integers(7, 9), st.randoms(use_true_random=False))
def test_prefix_strategies_depend_only_on_count_multiset(counts, m, rnd):
    base = DeterministicStrategy(m=m, masks=tuple((1 << c) - 1 for c in counts))
    shuffled = list(counts)
    rnd.shuffle(shuffled)
    other = DeterministicStrategy(m=m, masks=tuple((1 << c) - 1 for c in shuffled))
    assert count_zero_sum_convolution(other, m) == count_zero_sum_convolution(base, m)


def test_all_plus_zero_sum_is_power():
    for n in range(2, 9):
        for m in range(2, 12):
            s = DeterministicStrategy(m=m, masks=((1 << m) - 1,) * n)
            assert count_zero_sum_convolution(s, m) == m ** (n - 1)


def pair_strategy(n, m):
    """m parties on {0, 1}, the rest on {0}."""
    return DeterministicStrategy(m=m, masks=(0b11,) * m + (0b1,) * (n - m))


def test_pair_strategy_zero_sum_is_two():
    for m in range(2, 12):
        for n in range(m, 21):
            assert count_zero_sum_convolution(pair_strategy(n, m), m) == 2


def test_line_examples():
    line = line_from_strategy(vec((1, 1), (1, 1)), 2)
    assert (line.p, line.q) == (1, Fraction(1, 2))
    for n in range(2, 6):
        for m in range(2, 8):
            line = line_from_strategy(DeterministicStrategy(m=m, masks=((1 << m) - 1,) * n), m)
            assert (line.p, line.q) == (Fraction(n, m), Fraction(1, m))
    for m in range(2, 8):
        for n in range(m, 12):
            line = line_from_strategy(pair_strategy(n, m), m)
            assert (line.p, line.q) == (n - Fraction(m, 2), Fraction(1, 2 ** (m - 1)))


def test_line_needs_every_party_active():
    with pytest.raises(VacuousConstraint):
        line_from_strategy(vec((0, 0, 0), (1, 0, 0)), 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5), st.integers(2, 7), st.randoms(use_true_random=False))
def test_line_slope_and_intercept_signs(n, m, rnd):
    line = line_from_strategy(random_strategy(rnd, n, m), m)
    assert line.q >= 0 and line.p > 0


def test_enumerate_all_counts():
    assert sum(1 for _ in enumerate_all(2, 2)) == 9
    assert sum(1 for _ in enumerate_all(3, 3)) == 343
    assert count_all(5, 5) == 31**5 == 28_629_151


def test_enumerate_all_is_lexicographic_and_complete():
    seen = [tuple("".join(map(str, v)) for v in s.vectors) for s in enumerate_all(2, 3)]
    assert seen == sorted(seen)
    assert len(set(seen)) == 49
    assert all("1" in part for row in seen for part in row)


def test_enumerate_all_chunks_partition_the_stream():
    whole = list(enumerate_all(3, 3))
    parts = [list(enumerate_all(3, 3, chunk=(k, 5))) for k in range(5)]
    assert [s for part in parts for s in part] == whole


def test_enumerate_all_budget():
    with pytest.raises(BudgetExceeded, match="regular"):
        next(enumerate_all(6, 6, budget=10**6))


def test_enumerate_regular_counts():
    arr = [r for r in enumerate_regular(2, 3, balanced_only=True) if sum(r.counts) == 4]
    assert [r.counts for r in arr] == [(2, 2)] * 3
    assert sorted(r.shift for r in arr) == [0, 1, 2]
    assert sum(1 for _ in enumerate_regular(3, 3, balanced_only=True)) == 21
    full = list(enumerate_regular(5, 5, balanced_only=False))
    assert len(full) == count_regular(5, 5, False) == 5 * math.comb(8, 4) * 5
    assert all(list(r.counts[1:]) == sorted(r.counts[1:], reverse=True) for r in full)


def test_balanced_patterns_differ_by_at_most_one():
    for r in enumerate_regular(6, 7, balanced_only=True):
        assert max(r.counts) - min(r.counts) <= 1


def test_strategy_of_examples():
    s = strategy_of(RegularArrangement((2, 2), 2), 2, 3)
    assert s.vectors == ((1, 0, 1), (1, 1, 0))
    s = strategy_of(RegularArrangement((3, 2, 1), 0), 3, 4)
    assert s.vectors == ((1, 1, 1, 0), (1, 1, 0, 0), (1, 0, 0, 0))
    s = strategy_of(RegularArrangement((1, 1, 1), 0), 3, 3)
    assert s.vectors == ((1, 0, 0),) * 3


def _slow_line_set(strategies, m):
    return {line_from_strategy(s, m).key for s in strategies}


@pytest.mark.parametrize("n, m", [(2, 2), (2, 4), (3, 3), (3, 4), (2, 5)])
def test_exhaustive_table_matches_generator(n, m):
    fast = {line.key for line in lines_from_table(exhaustive_line_table(n, m), m)}
    assert fast == _slow_line_set(enumerate_all(n, m), m)


@pytest.mark.parametrize("n, m", [(2, 3), (3, 3), (3, 5), (4, 5), (5, 7)])
@pytest.mark.parametrize("balanced", [True, False])
def test_regular_table_matches_generator(n, m, balanced):
    fast = {line.key for line in lines_from_table(regular_line_table(n, m, balanced), m)}
    slow = _slow_line_set((strategy_of(r, n, m) for r in enumerate_regular(n, m, balanced)), m)
    assert fast == slow


def test_table_witnesses_reproduce_their_key():
    for (counts, S), s in exhaustive_line_table(3, 4).items():
        assert tuple(sorted(s.counts)) == counts
        assert count_zero_sum_naive(s, 4) == S


def test_parallel_exhaustive_table_matches_serial():
    assert exhaustive_line_table(3, 3, workers=2) == exhaustive_line_table(3, 3)
