from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permfix import fixedsets, permcore
from permfix.errors import CapExceededError, DivisibilityError, DomainError, InconsistencyError
from permfix.fixedsets import KDVectors
from permfix.permcore import Permutation, make_rng


def has_fixed_sets(perm: Permutation, k, d) -> bool:
    """Search directly for disjoint invariant sets: try every labeling of the points."""
    cycles = perm.cycles()
    for labels in itertools.product(range(len(k) + 1), repeat=len(cycles)):
        sizes = [0] * len(k)
        ok = True
        for cyc, lab in zip(cycles, labels):
            if lab == len(k):
                continue
            if len(cyc) % d[lab]:
                ok = False
                break
            sizes[lab] += len(cyc)
        if ok and sizes == list(k):
            return True
    return False


def direct_i(k, d):
    # independent of the census: labeled cycles may also sit outside every A_i
    n = sum(k)
    hits = sum(
        has_fixed_sets(Permutation(p), k, d) for p in itertools.permutations(range(1, n + 1))
    )
    return Fraction(hits, math.factorial(n))


def test_spot_values():
    assert fixedsets.exact_i(KDVectors((2, 2), (1, 1))) == Fraction(5, 12)
    assert fixedsets.exact_i(KDVectors((4,), (1,))) == 1
    assert fixedsets.exact_i(KDVectors((2,), (2,))) == Fraction(1, 2)
    assert fixedsets.exact_i(KDVectors((4,), (2,))) == Fraction(3, 8)


def test_kd_validation():
    with pytest.raises(DivisibilityError):
        KDVectors((3, 2), (2, 1))
    with pytest.raises(DomainError):
        KDVectors((2,), (1, 1))
    with pytest.raises(DomainError):
        KDVectors((0,), (1,))
    kd = KDVectors((3, 2), (1, 2))
    assert kd.n == 5 and kd.m == 2 and kd.canonical() == ((2, 2), (3, 1))
    assert kd.to_dict() == {"n": 5, "k": [3, 2], "d": [1, 2]}


def test_feasible_examples_and_errors():
    kd = KDVectors((2, 2), (1, 1))
    assert fixedsets.feasible((0, 2, 0, 0), kd)
    assert fixedsets.feasible((2, 1, 0, 0), kd)
    assert not fixedsets.feasible((1, 0, 1, 0), kd)
    assert not fixedsets.feasible((0, 0, 0, 1), kd)
    with pytest.raises(InconsistencyError):
        fixedsets.feasible((1,), kd)


@pytest.mark.parametrize("n", range(1, 6))
def test_brute_force_oracle_against_direct_search(n):
    for kd in fixedsets.iter_kd_vectors(n, 2):
        assert fixedsets.brute_force_i(kd) == direct_i(kd.k, kd.d)


@pytest.mark.parametrize("n", range(1, 8))
def test_exact_matches_brute_force(n):
    for kd in fixedsets.iter_kd_vectors(n, 3):
        assert fixedsets.exact_i(kd) == fixedsets.brute_force_i(kd), kd


def test_general_dp_agrees_with_two_class_bitset():
    for n in range(2, 11):
        for kd in fixedsets.iter_kd_vectors(n, 2):
            if kd.m != 2:
                continue
            pairs = kd.canonical()
            for parts in permcore.iter_partitions(n):
                counts = permcore.partition_to_counts(parts, n)
                assert fixedsets._feasible_two(counts, pairs) == fixedsets._feasible_general(
                    counts, pairs
                )


def test_invariant_under_reordering_pairs():
    for n in range(3, 9):
        for kd in fixedsets.iter_kd_vectors(n, 3):
            for perm in itertools.permutations(range(kd.m)):
                other = KDVectors(tuple(kd.k[i] for i in perm), tuple(kd.d[i] for i in perm))
                fixedsets.clear_cache()
                assert fixedsets.exact_i(other) == fixedsets.exact_i(kd)


def test_submultiplicative_on_splits():
    for n in range(2, 9):
        for kd in fixedsets.iter_kd_vectors(n, 3):
            if kd.m < 2:
                continue
            value = fixedsets.exact_i(kd)
            for r in range(1, kd.m):
                for left in itertools.combinations(range(kd.m), r):
                    right = [i for i in range(kd.m) if i not in left]
                    a = KDVectors(tuple(kd.k[i] for i in left), tuple(kd.d[i] for i in left))
                    b = KDVectors(tuple(kd.k[i] for i in right), tuple(kd.d[i] for i in right))
                    assert value <= fixedsets.exact_i(a) * fixedsets.exact_i(b)


def test_crude_bound():
    assert fixedsets.crude_bound(KDVectors((2, 2), (1, 1))) == 1.0
    assert fixedsets.crude_bound(KDVectors((4,), (2,))) == pytest.approx(0.5)
    assert fixedsets.crude_bound(KDVectors((3, 3), (3, 1))) == pytest.approx(3 ** (-2 / 3))
    for n in range(1, 9):
        for kd in fixedsets.iter_kd_vectors(n, 3):
            assert float(fixedsets.exact_i(kd)) <= fixedsets.crude_bound(kd) + 1e-12


def test_f_divisible_values():
    assert fixedsets.f_divisible(2, 2) == 1
    assert fixedsets.f_divisible(4, 2) == 9
    assert fixedsets.f_divisible(6, 3) == 160
    assert fixedsets.f_divisible(5, 2) == 0
    assert fixedsets.f_divisible(0, 3) == 1
    with pytest.raises(DomainError):
        fixedsets.f_divisible(4, 1)


@given(st.integers(2, 6).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, 5).map(lambda q: q * d))))
@settings(max_examples=40, deadline=None)
def test_f_divisible_is_the_single_class_event(dn):
    d, n = dn
    assert Fraction(fixedsets.f_divisible(n, d), math.factorial(n)) == fixedsets.exact_i(
        KDVectors((n,), (d,))
    )


def test_caps():
    with pytest.raises(CapExceededError):
        fixedsets.exact_i(KDVectors((30, 30), (1, 1)))
    with pytest.raises(CapExceededError):
        fixedsets.brute_force_i(KDVectors((5, 5), (1, 1)))


def test_parallel_matches_serial():
    kd = KDVectors((6, 6), (2, 1))
    serial = fixedsets.exact_count(("i", kd.canonical()), kd.n, 1)
    assert fixedsets.exact_count(("i", kd.canonical()), kd.n, 3) == serial


def test_mc_calibration():
    kd = KDVectors((3, 3), (1, 1))
    est, se = fixedsets.mc_i(kd, 50_000, make_rng(17))
    assert abs(est - float(fixedsets.exact_i(kd))) < 5 * se


def test_local_global_report_rows_positive():
    rows = fixedsets.local_global_report([8, 10], 2000, make_rng(3))
    for row in rows:
        assert row.k == row.n // 2
        assert row.heuristic > 0 and math.isfinite(row.ratio) and row.ratio > 0
    with pytest.raises(DomainError):
        fixedsets.local_global_report([9], 100, make_rng(0))


def test_divisible_envelope_and_second_moment_rows():
    lo, hi = fixedsets.divisible_ratio_envelope(2, 60)
    assert 0 < lo <= hi <= 1
    rows = fixedsets.partition_d1_report([2, 4, 6], 2, 2)
    assert [r[0] for r in rows] == [2, 4, 6]
    assert all(0 < r[1] <= 1 and r[3] > 0 for r in rows)
