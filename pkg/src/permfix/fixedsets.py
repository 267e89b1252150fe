"""Disjoint fixed sets with divisibility constraints.

``i(n, k, d)`` is the proportion of ``pi`` in ``S_n`` having disjoint
invariant sets ``A_1..A_m`` with ``|A_i| = k_i`` such that every cycle of
``pi`` restricted to ``A_i`` has length divisible by ``d_i``. It depends only
on the cycle type, so the exact value is a sum of class weights over the
feasible cycle types.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from permfix import kernels
from permfix.config import BRUTE_FORCE_CAP, ENUMERATION_CAP, TUPLE_BUDGET
from permfix.errors import CapExceededError, DivisibilityError, DomainError, InconsistencyError
from permfix.lsets import expected_lset_size, mean_and_stderr
from permfix.permcore import (
    PartialCycleType,
    class_weight,
    iter_partitions,
    partition_to_counts,
    sample_uniform_batch,
)


@dataclass(frozen=True)
class KDVectors:
    k: tuple
    d: tuple

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        d = tuple(int(x) for x in self.d)
        if not k or len(k) != len(d):
            raise DomainError("k and d must be nonempty and of equal length")
        if any(x < 1 for x in k) or any(x < 1 for x in d):
            raise DomainError("k_i and d_i must be positive")
        bad = [(ki, di) for ki, di in zip(k, d) if ki % di]
        if bad:
            raise DivisibilityError(f"d_i must divide k_i; violated by (k_i, d_i) in {bad}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return sum(self.k)

    @property
    def m(self) -> int:
        return len(self.k)

    def canonical(self) -> tuple:
        """Sorted ``(k_i, d_i)`` pairs; the event is symmetric under reordering."""
        return tuple(sorted(zip(self.k, self.d)))

    def to_dict(self) -> dict:
        return {"n": self.n, "k": list(self.k), "d": list(self.d)}


def _counts_of(c) -> tuple:
    if isinstance(c, PartialCycleType):
        return c.counts
    return tuple(int(x) for x in c)


def feasible(c, kd: KDVectors) -> bool:
    """Can the cycles of ``c`` be split into classes meeting ``kd``?"""
    counts = _counts_of(c)
    S = sum(j * cj for j, cj in enumerate(counts, 1))
    if S != kd.n:
        raise InconsistencyError(f"S(c)={S} but sum(k)={kd.n}")
    return _feasible_cached(counts, kd.canonical())


@lru_cache(maxsize=1 << 20)
def _feasible_cached(counts: tuple, pairs: tuple) -> bool:
    if len(pairs) == 1:
        (_, d), = pairs
        return all(cj == 0 or j % d == 0 for j, cj in enumerate(counts, 1))
    if len(pairs) == 2:
        return _feasible_two(counts, pairs)
    return _feasible_general(counts, pairs)


def _feasible_two(counts: tuple, pairs: tuple) -> bool:
    # bitset over the total already placed in class 1
    (k1, d1), (_, d2) = pairs
    mask = (1 << (k1 + 1)) - 1
    bits = 1
    for j in range(len(counts), 0, -1):
        cj = counts[j - 1]
        if not cj:
            continue
        in1, in2 = j % d1 == 0, j % d2 == 0
        if in1 and in2:
            for _ in range(cj):
                bits = (bits | (bits << j)) & mask
        elif in1:
            bits = (bits << (j * cj)) & mask
        elif not in2:
            return False
        if not bits:
            return False
    return bool(bits >> k1 & 1)


def _distribute(residual: tuple, allowed: list, j: int, count: int, out: set):
    # place `count` cycles of length j among the allowed classes
    if count == 0:
        out.add(residual)
        return
    if not allowed:
        return
    first, rest = allowed[0], allowed[1:]
    top = min(count, residual[first] // j)
    for x in range(top, -1, -1):
        if not rest and x != count:
            continue
        nxt = residual[:first] + (residual[first] - j * x,) + residual[first + 1 :]
        _distribute(nxt, rest, j, count - x, out)


def _feasible_general(counts: tuple, pairs: tuple) -> bool:
    # residual capacities per class, lengths processed in decreasing order
    states = {tuple(k for k, _ in pairs)}
    for j in range(len(counts), 0, -1):
        cj = counts[j - 1]
        if not cj:
            continue
        allowed = [i for i, (_, d) in enumerate(pairs) if j % d == 0]
        if not allowed:
            return False
        nxt: set = set()
        for state in states:
            _distribute(state, allowed, j, cj, nxt)
        states = nxt
        if not states:
            return False
    return bool(states)


def clear_cache():
    _feasible_cached.cache_clear()


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceededError(f"n={n} exceeds enumeration cap {cap}")


def _exact_count_slice(pred_args: tuple, n: int, start: int, stop: int | None) -> int:
    # sum of n!/weight over feasible types with stream index in [start, stop)
    kind, payload = pred_args
    fact = math.factorial(n)
    total = 0
    for idx, parts in enumerate(iter_partitions(n)):
        if idx < start:
            continue
        if stop is not None and idx >= stop:
            break
        counts = partition_to_counts(parts, n)
        if kind == "i":
            ok = _feasible_cached(counts, payload)
        else:
            from permfix.blocksys import _preserves_block_system

            ok = _preserves_block_system(counts, *payload)
        if ok:
            total += fact // class_weight(counts)
    return total


def _partition_count(n: int) -> int:
    return sum(1 for _ in iter_partitions(n))


def exact_count(pred_args: tuple, n: int, threads: int = 1) -> int:
    """Number of permutations of ``S_n`` whose cycle type satisfies the predicate.

    With ``threads > 1`` the cycle-type stream is cut into index ranges that
    are evaluated in worker processes; the integer sum is order independent.
    """
    if threads <= 1:
        return _exact_count_slice(pred_args, n, 0, None)
    total_types = _partition_count(n)
    step = -(-total_types // threads)
    bounds = [(s, min(s + step, total_types)) for s in range(0, total_types, step)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_exact_count_slice, pred_args, n, a, b) for a, b in bounds]
        return sum(f.result() for f in futures)


def exact_i(kd: KDVectors, cap: int = ENUMERATION_CAP, threads: int = 1) -> Fraction:
    _check_cap(kd.n, cap)
    count = exact_count(("i", kd.canonical()), kd.n, threads)
    return Fraction(count, math.factorial(kd.n))


def f_divisible(n: int, d: int) -> int:
    """Permutations of ``n`` points with every cycle length divisible by ``d``.

    Uses ``f(n) = (n-1)(n-2)...(n-d+2) (n-d+1)^2 f(n-d)`` with ``f(0) = 1``;
    for ``d`` not dividing ``n`` the value is 0.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    if d < 2:
        raise DomainError("d must be at least 2")
    if n % d:
        return 0
    f = 1
    for t in range(d, n + 1, d):
        f *= math.prod(range(t - d + 2, t)) * (t - d + 1) ** 2
    return f


def iter_kd_vectors(n: int, m_max: int):
    """Every valid ``(k, d)`` with ``k`` a composition of ``n`` into at most ``m_max`` parts."""
    for m in range(1, m_max + 1):
        for cuts in itertools.combinations(range(1, n), m - 1):
            k = tuple(b - a for a, b in zip((0,) + cuts, cuts + (n,)))
            divisors = [[d for d in range(1, ki + 1) if ki % d == 0] for ki in k]
            for d in itertools.product(*divisors):
                yield KDVectors(k, d)


# -- brute-force oracle ------------------------------------------------------


@lru_cache(maxsize=None)
def _cycle_length_census(n: int) -> tuple:
    """``(lengths, how many permutations)`` from walking every element of ``S_n``."""
    census: Counter = Counter()
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        lengths = []
        for x in range(n):
            if seen[x]:
                continue
            length = 0
            y = x
            while not seen[y]:
                seen[y] = True
                y = perm[y]
                length += 1
            lengths.append(length)
        census[tuple(sorted(lengths, reverse=True))] += 1
    return tuple(sorted(census.items()))


def _assignable(lengths: tuple, k: tuple, d: tuple) -> bool:
    # depth-first over the labeled cycles, each trying every class
    need = list(k)

    def place(idx: int) -> bool:
        if idx == len(lengths):
            return not any(need)
        ell = lengths[idx]
        for i in range(len(need)):
            if ell % d[i] == 0 and need[i] >= ell:
                need[i] -= ell
                if place(idx + 1):
                    return True
                need[i] += ell
        return False

    return place(0)


def brute_force_i(kd: KDVectors, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Exhaustive ``i(n, k, d)`` over every permutation of ``S_n`` (``n <= 9``)."""
    if kd.n > cap:
        raise CapExceededError(f"brute force limited to n <= {cap}")
    hits = sum(cnt for lengths, cnt in _cycle_length_census(kd.n) if _assignable(lengths, kd.k, kd.d))
    return Fraction(hits, math.factorial(kd.n))


# -- Monte Carlo and reports -------------------------------------------------


def mc_i(kd: KDVectors, trials: int, rng: np.random.Generator) -> tuple:
    """``(estimate, stderr)`` of ``i(n, k, d)`` from uniform permutations."""
    if trials < 2:
        raise DomainError("trials must be at least 2")
    types = kernels.cycle_type_rows(sample_uniform_batch(kd.n, trials, rng))[:, 1:]
    uniq, inverse = np.unique(types, axis=0, return_inverse=True)
    pairs = kd.canonical()
    hit = np.array([_feasible_cached(tuple(int(x) for x in row), pairs) for row in uniq], dtype=float)
    return mean_and_stderr(hit[np.asarray(inverse).reshape(-1)])


def crude_bound(kd: KDVectors) -> float:
    """``prod_i k_i^(-1 + 1/d_i)``."""
    return math.prod(float(k) ** (-1.0 + 1.0 / d) for k, d in zip(kd.k, kd.d))


@dataclass(frozen=True)
class LocalGlobalRow:
    n: int
    k: int
    exact: Fraction
    lset_mean: float
    lset_stderr: float

    @property
    def heuristic(self) -> float:
        """``E|L_2(X_k)| / k``."""
        return self.lset_mean / self.k

    @property
    def ratio(self) -> float:
        return float(self.exact) / self.heuristic


def local_global_report(
    n_list: Sequence[int],
    trials: int,
    rng: np.random.Generator,
    cap: int = ENUMERATION_CAP,
    budget: int = TUPLE_BUDGET,
) -> list:
    """Compare ``i(n, (n/2, n/2))`` with ``E|L_2(X_{n/2})| / (n/2)`` for each ``n``."""
    rows = []
    for n in n_list:
        if n < 2 or n % 2:
            raise DomainError(f"n must be even and >= 2, got {n}")
        k = n // 2
        exact = exact_i(KDVectors((k, k), (1, 1)), cap)
        mean, se = expected_lset_size(k, 2, trials, rng, budget)
        rows.append(LocalGlobalRow(n, k, exact, mean, se))
    return rows


def divisible_ratio_envelope(d: int, n_max: int) -> tuple:
    """Min and max of ``(f_d(n)/n!) / n^(-1+1/d)`` over multiples ``n <= n_max``."""
    ratios = []
    for n in range(d, n_max + 1, d):
        p = Fraction(f_divisible(n, d), math.factorial(n))
        ratios.append(float(p) / n ** (-1.0 + 1.0 / d))
    return min(ratios), max(ratios)


def partition_d1_report(k1_values: Sequence[int], k2: int, d: int, cap: int = ENUMERATION_CAP) -> list:
    """Rows ``(k1, i(n,(k1,k2),(d,1)), k1^(-1+1/d), ratio)`` for the two-class case."""
    rows = []
    for k1 in k1_values:
        p = exact_i(KDVectors((k1, k2), (d, 1)), cap)
        ref = k1 ** (-1.0 + 1.0 / d)
        rows.append((k1, p, ref, float(p) / ref))
    return rows
