from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permfix import permcore
from permfix.errors import CapExceededError, DomainError, InconsistencyError
from permfix.permcore import CycleType, PartialCycleType, Permutation


def brute_cycle_counts(n):
    """Counter of cycle-count vectors over every element of S_n."""
    out = Counter()
    for images in itertools.permutations(range(1, n + 1)):
        out[permcore.cycle_type(Permutation(images)).counts] += 1
    return out


perms = st.integers(1, 9).flatmap(lambda n: st.permutations(list(range(1, n + 1)))).map(
    lambda xs: Permutation(tuple(xs))
)


def test_permutation_validation():
    with pytest.raises(DomainError):
        Permutation((1, 1, 2))
    with pytest.raises(DomainError):
        Permutation(())
    with pytest.raises(DomainError):
        Permutation((0, 1))


def test_from_cycles_and_str():
    p = Permutation.from_cycles(5, [[1, 2], [3, 4, 5]])
    assert p.images == (2, 1, 4, 5, 3)
    assert p.order() == 6
    assert (p**3).moved_points() == 2
    assert str(Permutation.identity(3)) == "()"


@given(perms, st.data())
def test_group_laws(p, data):
    q = Permutation(tuple(data.draw(st.permutations(list(range(1, p.n + 1))))))
    assert (p * q)(1) == p(q(1))
    assert (p * p.inverse()).is_identity()
    assert (p ** p.order()).is_identity()
    assert p ** -1 == p.inverse()


@given(perms)
def test_cycle_type_reconstructs_lengths(p):
    c = permcore.cycle_type(p)
    assert c.total == p.n
    assert sorted(c.lengths()) == sorted(len(cyc) for cyc in p.cycles())


def test_cycle_type_examples():
    assert permcore.cycle_type(Permutation((2, 1, 3))).counts == (1, 1, 0)
    assert permcore.cycle_type(Permutation.identity(4)).counts == (4, 0, 0, 0)


def test_cycle_type_normalizes_length():
    c = CycleType((1, 1, 1))
    assert c.n == 6 and c.counts == (1, 1, 1, 0, 0, 0)
    assert CycleType.from_lengths([3, 1]).counts == (1, 0, 1, 0)
    assert CycleType((0, 2)).probability() == Fraction(1, 8)
    with pytest.raises(DomainError):
        CycleType((0, 0))


def test_partitions_reverse_lex():
    assert permcore.partitions_of(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    # p(n) for a few n
    assert [len(permcore.partitions_of(n)) for n in (1, 5, 10, 20)] == [1, 7, 42, 627]


def test_class_weight():
    assert permcore.class_weight((0, 2)) == 8
    assert permcore.class_weight((3,)) == 6
    assert math.factorial(4) // permcore.class_weight((0, 0, 0, 1)) == 6


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_matches_full_census(n):
    census = brute_cycle_counts(n)
    enumerated = dict((c.counts, p) for c, p in permcore.enumerate_cycle_types(n))
    assert set(enumerated) == set(census)
    fact = math.factorial(n)
    for counts, hits in census.items():
        assert enumerated[counts] == Fraction(hits, fact)


@pytest.mark.slow
@pytest.mark.parametrize("n", [9, 10])
def test_enumeration_matches_full_census_large(n):
    census = brute_cycle_counts(n)
    enumerated = dict((c.counts, p) for c, p in permcore.enumerate_cycle_types(n))
    assert all(enumerated[k] == Fraction(v, math.factorial(n)) for k, v in census.items())


@pytest.mark.parametrize("n", [1, 7, 25, 50])
def test_probabilities_sum_to_one(n):
    assert sum(p for _, p in permcore.enumerate_cycle_types(n)) == 1


def test_enumeration_order_and_cap():
    stream = [c.counts for c, _ in permcore.enumerate_cycle_types(3)]
    assert stream == [(0, 0, 1), (1, 1, 0), (3, 0, 0)]
    with pytest.raises(CapExceededError):
        next(permcore.enumerate_cycle_types(51))
    assert next(permcore.enumerate_cycle_types(60, cap=60))[0].n == 60


def test_stats():
    assert permcore.stats((0, 2, 0, 1)) == (8, 4, 2)
    S, cp, cm = permcore.stats(PartialCycleType((0, 0)))
    assert (S, cp) == (0, 0) and math.isinf(cm)


def test_partial_cycle_type_addition():
    a = PartialCycleType((1, 0, 2))
    b = PartialCycleType((0, 3))
    assert (a + b).counts == (1, 3, 2)
    assert a[3] == 2 and a[5] == 0


def test_sampling_deterministic_and_uniform_shape():
    a = permcore.sample_uniform_batch(7, 50, permcore.make_rng(1))
    b = permcore.sample_uniform_batch(7, 50, permcore.make_rng(1))
    assert np.array_equal(a, b)
    assert all(sorted(row) == list(range(7)) for row in a.tolist())
    streams = permcore.spawn_rngs(5, 3)
    draws = [s.integers(0, 2**32) for s in streams]
    assert len(set(draws)) == 3


def test_uniform_sampler_fixed_point_rate():
    # E[#fixed points] = 1 with variance 1
    rows = permcore.cycle_types_of(permcore.sample_uniform_batch(10, 20000, permcore.make_rng(3)))
    fixed = rows[:, 1]
    assert abs(fixed.mean() - 1.0) < 5 * fixed.std(ddof=1) / math.sqrt(len(fixed))


def test_poisson_counts_moments():
    x = permcore.poisson_counts_batch(4, 100_000, permcore.make_rng(11))
    for j in range(1, 5):
        col = x[:, j - 1]
        se = math.sqrt((1 / j) / len(col))
        assert abs(col.mean() - 1 / j) < 5 * se
    single = permcore.sample_poisson_counts(3, permcore.make_rng(0))
    assert single.k == 3


def brute_prescribed(n, c, k):
    target = tuple(c) + (0,) * (k - len(c))
    hits = 0
    for counts, num in brute_cycle_counts(n).items():
        if tuple(counts[:k]) == target:
            hits += num
    return hits


def test_prescribed_small_cycles_examples():
    assert permcore.count_prescribed_small_cycles(4, (0,), 1) == 9
    assert permcore.count_prescribed_small_cycles(3, (3, 0, 0), 3) == 1
    assert permcore.count_prescribed_small_cycles(6, (1, 1), 2) == brute_prescribed(6, (1, 1), 2)


@pytest.mark.parametrize("n", range(1, 9))
def test_prescribed_small_cycles_against_brute_force(n):
    census = brute_cycle_counts(n)
    for k in range(1, n + 1):
        observed = Counter()
        for counts, num in census.items():
            observed[counts[:k]] += num
        for parts_total in range(n + 1):
            for c in itertools.product(*(range(parts_total // j + 1) for j in range(1, k + 1))):
                if sum(j * cj for j, cj in enumerate(c, 1)) != parts_total:
                    continue
                assert permcore.count_prescribed_small_cycles(n, c, k) == observed.get(c, 0)


def test_prescribed_small_cycles_errors():
    with pytest.raises(InconsistencyError):
        permcore.count_prescribed_small_cycles(3, (4,), 1)
    with pytest.raises(DomainError):
        permcore.count_prescribed_small_cycles(3, (0,), 4)


def test_sieve_ratio_envelope():
    # count is of order n!/(k * prod c_i! i^c_i) when k < n - S(c)
    ratios = []
    for n in range(4, 41, 3):
        for k in range(1, n):
            for c in [(0,) * k, (1,) + (0,) * (k - 1), (0, 1) + (0,) * max(k - 2, 0)]:
                c = c[:k]
                S = sum(j * cj for j, cj in enumerate(c, 1))
                if k > n - S - 1:
                    continue
                count = permcore.count_prescribed_small_cycles(n, c, k)
                ratios.append(Fraction(count * k * permcore.class_weight(c), math.factorial(n)))
    assert ratios
    assert min(ratios) >= Fraction(1, 10) and max(ratios) <= 10


@given(st.integers(1, 30), st.integers(1, 6))
@settings(max_examples=60)
def test_no_short_cycles_matches_zero_prescription(n, k):
    if k <= n:
        assert permcore.count_no_short_cycles(n, k) == permcore.count_prescribed_small_cycles(n, (0,) * k, k)


def test_no_short_cycles_small_values():
    assert [permcore.count_no_short_cycles(n, 1) for n in range(7)] == [1, 0, 1, 2, 9, 44, 265]
    assert permcore.count_no_short_cycles(6, 2) == 160
