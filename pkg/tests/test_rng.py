import math
from collections import Counter
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from versaml.rng import DeterministicRng, worker_rngs

A = 6364136223846793005
C = 1442695040888963407


def lcg_oracle(seed, steps):
    # plain big-integer recurrence, reduced explicitly
    out, s = [], seed
    for _ in range(steps):
        s = (s * A + C) % 2**64
        out.append(s)
    return out


def test_first_draws_match_recurrence():
    assert DeterministicRng(0).next_u64() == 1442695040888963407
    assert DeterministicRng(1).next_u64() == 7806831264735756412
    r = DeterministicRng(0)
    r.next_u64()
    assert r.next_u64() == (C * A + C) % 2**64


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_sequence_matches_integer_oracle(seed):
    r = DeterministicRng(seed)
    assert [r.next_u64() for _ in range(5)] == lcg_oracle(seed, 5)


def test_next_double_construction():
    assert DeterministicRng(0).next_double() == (1442695040888963407 >> 11) * 2.0**-53


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_next_double_in_unit_interval(seed):
    r = DeterministicRng(seed)
    for _ in range(20):
        assert 0.0 <= r.next_double() < 1.0


def test_same_seed_same_sequence():
    a, b = DeterministicRng(99), DeterministicRng(99)
    assert [a.next_double() for _ in range(1000)] == [b.next_double() for _ in range(1000)]


def test_one_state_step_per_draw():
    r = DeterministicRng(5)
    r.next_double()
    r.next_range(0, 1)
    assert r.state == lcg_oracle(5, 2)[1]


def test_next_range_singleton_and_errors():
    assert DeterministicRng(3).next_range(5, 5) == 5
    with pytest.raises(ValueError):
        DeterministicRng(3).next_range(3, 0)


def test_next_range_coin_frequency():
    r = DeterministicRng(12)
    ones = sum(r.next_range(0, 1) for _ in range(100_000))
    assert abs(ones / 100_000 - 0.5) <= 0.01


def test_next_range_chi_square_seven_buckets():
    r = DeterministicRng(2024)
    n = 100_000
    counts = Counter(r.next_range(0, 6) for _ in range(n))
    expected = n / 7
    chi2 = sum((counts[i] - expected) ** 2 / expected for i in range(7))
    # 6 degrees of freedom, p = 0.001 critical value
    assert chi2 < 22.458


@given(st.integers(min_value=0, max_value=2**32), st.integers(-50, 50), st.integers(0, 100))
def test_next_range_stays_in_bounds(seed, lo, width):
    r = DeterministicRng(seed)
    for _ in range(10):
        assert lo <= r.next_range(lo, lo + width) <= lo + width


def test_shuffle_trivial_cases():
    assert DeterministicRng(0).shuffle([]) == []
    assert DeterministicRng(0).shuffle([42]) == [42]


def test_shuffle_hand_trace_seed0():
    # trace both swaps with the integer oracle: i = 2 then i = 1
    draws = iter(lcg_oracle(0, 10))

    def ranged(hi):
        shift = 64 - hi.bit_length()
        while True:
            v = next(draws) >> shift
            if v <= hi:
                return v

    items = [0, 1, 2]
    for i in (2, 1):
        j = ranged(i)
        items[i], items[j] = items[j], items[i]
    assert DeterministicRng(0).shuffle([0, 1, 2]) == items


def test_shuffle_permutation_frequencies():
    counts = Counter(tuple(DeterministicRng(s).shuffle([0, 1, 2])) for s in range(100_000))
    assert set(counts) == set(permutations(range(3)))
    for c in counts.values():
        assert abs(c / 100_000 - 1 / 6) <= 0.02


@given(st.integers(0, 2**32), st.lists(st.integers(), max_size=30))
def test_shuffle_is_permutation_and_copy(seed, items):
    before = list(items)
    out = DeterministicRng(seed).shuffle(items)
    assert sorted(out) == sorted(items)
    assert items == before


def test_gaussian_moments():
    r = DeterministicRng(77)
    x = np.array([r.next_gaussian() for _ in range(100_000)])
    assert abs(x.mean()) < 0.02
    assert abs(x.var() - 1.0) < 0.03


def test_gaussian_pair_is_cached():
    r = DeterministicRng(4)
    r.next_gaussian()
    state = r.state
    r.next_gaussian()
    assert r.state == state
    a, b = DeterministicRng(8), DeterministicRng(8)
    assert [a.next_gaussian() for _ in range(9)] == [b.next_gaussian() for _ in range(9)]
    assert all(math.isfinite(v) for v in DeterministicRng(0).gaussian_array(1000))


def test_worker_seeds_are_offsets():
    rngs = worker_rngs(1001, 3)
    assert [g.next_u64() for g in rngs] == [DeterministicRng(1001 + i).next_u64() for i in range(3)]
