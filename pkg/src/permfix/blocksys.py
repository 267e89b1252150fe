"""Block systems: the probability ``I(n, nu)`` that a random permutation
preserves some partition of ``{1..n}`` into ``nu`` blocks of size ``n/nu``.

A permutation preserves such a system exactly when, for some partition
``(d_1..d_m)`` of ``nu``, it has disjoint invariant sets of sizes
``d_i * n/nu`` whose cycles are all divisible by ``d_i``. ``exact_I`` uses
that characterization per cycle type; ``brute_force_I`` checks block
systems directly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate

from permfix import kernels
from permfix.config import BRUTE_FORCE_CAP, ENUMERATION_CAP
from permfix.errors import CapExceededError, DomainError
from permfix.fixedsets import KDVectors, _check_cap, _feasible_cached, exact_count, exact_i
from permfix.lsets import mean_and_stderr
from permfix.permcore import partitions_of, sample_uniform_batch

TIE_GUARD = 1e-9
EXACT_SERIES_DEGREE = 200


@dataclass(frozen=True)
class BlockSystemQuery:
    n: int
    nu: int

    def __post_init__(self):
        if self.n < 1 or self.nu < 1:
            raise DomainError("n and nu must be positive")
        if self.n % self.nu:
            raise DomainError(f"nu={self.nu} does not divide n={self.n}")
        if not 1 < self.nu < self.n:
            raise DomainError(f"need 1 < nu < n, got nu={self.nu}, n={self.n}")

    @property
    def block_size(self) -> int:
        return self.n // self.nu


# -- exponents ---------------------------------------------------------------


def delta(m: int) -> float:
    """Closed form of ``int_1^{(m-1)/log m} log t dt``."""
    if m < 2:
        raise DomainError("m must be at least 2")
    L = math.log(m)
    return 1 - (m - 1) / L + (m - 1) * math.log(m - 1) / L - (m - 1) * math.log(L) / L


def delta_integral(m: int) -> float:
    """The same exponent by adaptive quadrature, for cross-checking :func:`delta`."""
    if m < 2:
        raise DomainError("m must be at least 2")
    upper = (m - 1) / math.log(m)
    value, _ = integrate.quad(math.log, 1.0, upper, epsabs=1e-14, epsrel=1e-14, limit=200)
    return value


@dataclass(frozen=True)
class ExponentReport:
    nu: int
    candidates: list
    dominant: tuple | None
    ambiguous: bool = False
    margin: float = field(default=math.inf)

    def exponent_of(self, partition: tuple) -> float:
        return dict(self.candidates)[partition]


def _candidate_exponents(nu: int) -> list:
    cands = [((1,) * nu, delta(nu))]
    for d in range(2, nu - 1):
        cands.append(((d,) + (1,) * (nu - d), 1 - 1 / d + delta(nu - d)))
    if nu >= 3:
        cands.append(((nu - 1, 1), 1 - 1 / (nu - 1)))
    cands.append(((nu,), 1 - 1 / nu))
    return cands


def dominant_partition(nu: int) -> ExponentReport:
    """Partition of ``nu`` whose block-system event decays slowest in ``n``.

    Candidates are the all-ones partition (exponent ``delta_nu``),
    ``(d, 1, ..., 1)`` for ``2 <= d <= nu-2`` (``1 - 1/d + delta_{nu-d}``),
    ``(nu-1, 1)`` (``1 - 1/(nu-1)``) and ``(nu)`` (``1 - 1/nu``). Partitions
    with two parts of size at least 2 decay at least like ``n^-1`` and are
    never competitive. A gap below ``TIE_GUARD`` is reported as ambiguous.
    """
    if not 2 <= nu <= 64:
        raise DomainError("nu must be in [2, 64]")
    cands = _candidate_exponents(nu)
    ranked = sorted(cands, key=lambda pe: pe[1])
    margin = ranked[1][1] - ranked[0][1] if len(ranked) > 1 else math.inf
    if margin < TIE_GUARD:
        return ExponentReport(nu, cands, None, True, margin)
    return ExponentReport(nu, cands, ranked[0][0], False, margin)


# -- exact and sampled I(n, nu) ----------------------------------------------


@lru_cache(maxsize=None)
def _ordered_partitions(nu: int) -> tuple:
    # predicted dominant partition first, the rest in reverse-lex order
    parts = partitions_of(nu)
    lead = (1,) * nu if nu <= 4 else (nu - 1, 1)
    return (lead,) + tuple(p for p in parts if p != lead)


@lru_cache(maxsize=None)
def _partition_pairs(n: int, nu: int) -> tuple:
    s = n // nu
    return tuple(
        KDVectors(tuple(d * s for d in part), part).canonical() for part in _ordered_partitions(nu)
    )


def _preserves_block_system(counts: tuple, n: int, nu: int) -> bool:
    return any(_feasible_cached(counts, pairs) for pairs in _partition_pairs(n, nu))


def preserves_block_system(c, q: BlockSystemQuery) -> bool:
    """Whether permutations of cycle type ``c`` preserve some ``nu``-block system."""
    counts = tuple(c.counts) if hasattr(c, "counts") else tuple(int(x) for x in c)
    if sum(j * cj for j, cj in enumerate(counts, 1)) != q.n:
        raise DomainError("cycle type does not have degree n")
    return _preserves_block_system(counts, q.n, q.nu)


def exact_I(q: BlockSystemQuery, cap: int = ENUMERATION_CAP, threads: int = 1) -> Fraction:
    _check_cap(q.n, cap)
    count = exact_count(("I", (q.n, q.nu)), q.n, threads)
    return Fraction(count, math.factorial(q.n))


def block_partitions(n: int, nu: int):
    """Partitions of ``{1..n}`` into ``nu`` blocks of size ``n/nu``.

    Each block is anchored at its least element, so every partition appears
    once. Yields tuples of sorted block tuples.
    """
    s = n // nu

    def rec(remaining: tuple):
        if not remaining:
            yield ()
            return
        anchor, rest = remaining[0], remaining[1:]
        for others in itertools.combinations(rest, s - 1):
            block = (anchor,) + others
            left = tuple(x for x in rest if x not in others)
            for tail in rec(left):
                yield (block,) + tail

    yield from rec(tuple(range(1, n + 1)))


def preserves_blocks(perm, blocks) -> bool:
    """Does ``perm`` (a 1-indexed Permutation) map each block onto a block?"""
    block_sets = {frozenset(b) for b in blocks}
    return all(frozenset(perm(x) for x in b) in block_sets for b in blocks)


@lru_cache(maxsize=4)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def brute_force_I(q: BlockSystemQuery, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Count permutations of ``S_n`` preserving at least one explicit block system."""
    if q.n > cap:
        raise CapExceededError(f"brute force limited to n <= {cap}")
    labels = []
    for blocks in block_partitions(q.n, q.nu):
        lab = [0] * q.n
        for b, block in enumerate(blocks):
            for x in block:
                lab[x - 1] = b
        labels.append(lab)
    hits = kernels.preserves_any_partition(
        _all_permutations(q.n), np.array(labels, dtype=np.int64), q.nu
    )
    return Fraction(int(hits.sum()), math.factorial(q.n))


def mc_I(q: BlockSystemQuery, trials: int, rng: np.random.Generator) -> tuple:
    """``(estimate, stderr)`` of ``I(n, nu)`` from uniform permutations."""
    if trials < 2:
        raise DomainError("trials must be at least 2")
    types = kernels.cycle_type_rows(sample_uniform_batch(q.n, trials, rng))[:, 1:]
    uniq, inverse = np.unique(types, axis=0, return_inverse=True)
    hit = np.array(
        [_preserves_block_system(tuple(int(x) for x in row), q.n, q.nu) for row in uniq],
        dtype=float,
    )
    return mean_and_stderr(hit[np.asarray(inverse).reshape(-1)])


def sandwich_bounds(q: BlockSystemQuery, cap: int = ENUMERATION_CAP) -> tuple:
    """``(max, sum)`` of ``i(n, (d_i n/nu), (d_i))`` over partitions of ``nu``."""
    s = q.block_size
    values = [exact_i(KDVectors(tuple(d * s for d in part), part), cap) for part in partitions_of(q.nu)]
    return max(values), sum(values, Fraction(0))


# -- generating functions ----------------------------------------------------


def coeff_exp_inv_square(M: int) -> np.ndarray:
    """Coefficients ``c_0..c_M`` of ``exp(sum_k z^k / k^2)`` as floats.

    ``c_m = (1/m) sum_{k=1}^m c_{m-k} / k``; quadratic in ``M``.
    """
    if M < 0 or M > 10**6:
        raise DomainError("M must be in [0, 10^6]")
    c = np.zeros(M + 1)
    c[0] = 1.0
    inv = 1.0 / np.arange(1, M + 1)
    for m in range(1, M + 1):
        c[m] = np.dot(inv[:m], c[m - 1 :: -1]) / m
    return c


def coeff_exp_inv_square_exact(M: int) -> list:
    if M < 0:
        raise DomainError("M must be nonnegative")
    c = [Fraction(1)]
    for m in range(1, M + 1):
        c.append(sum((c[m - k] / k for k in range(1, m + 1)), Fraction(0)) / m)
    return c


def _exp_series(log_coeffs: list, N: int) -> list:
    # F = exp(A): m F_m = sum_k k a_k F_{m-k}
    F = [Fraction(1)]
    w = [k * log_coeffs[k] for k in range(N + 1)]
    for m in range(1, N + 1):
        F.append(sum((w[k] * F[m - k] for k in range(1, m + 1)), Fraction(0)) / m)
    return F


def _exp_series_float_tail(weights: np.ndarray, head: list, N: int) -> np.ndarray:
    F = np.zeros(N + 1)
    F[: len(head)] = [float(x) for x in head]
    for m in range(len(head), N + 1):
        # all terms are positive; numpy's pairwise sum keeps the error O(log m) ulp
        F[m] = np.sum(weights[1 : m + 1] * F[m - 1 :: -1]) / m
    return F


def f_log_coeff(s: int, k: int) -> Fraction:
    """``(1/(s! k)) prod_{t=1}^{s-1} (1/k + t)``."""
    inv_k = Fraction(1, k)
    prod = Fraction(1)
    for t in range(1, s):
        prod *= inv_k + t
    return prod / (math.factorial(s) * k)


def f_series(s: int, N: int) -> list:
    """Coefficients ``0..N`` of ``f(z)``: exact to degree 200, floats after."""
    if s < 2:
        raise DomainError("block size s must be at least 2")
    E = min(N, EXACT_SERIES_DEGREE)
    logs = [Fraction(0)] + [f_log_coeff(s, k) for k in range(1, E + 1)]
    head = _exp_series(logs, E)
    if N <= E:
        return head
    weights = np.array(
        [0.0] + [k * float(f_log_coeff(s, k)) for k in range(1, N + 1)]
    )
    return list(_exp_series_float_tail(weights, head, N))


def inverse_root_coeffs(s: int, N: int) -> list:
    """Coefficients of ``(1 - z)^(-1/s)``, exact."""
    b = [Fraction(1)]
    for m in range(1, N + 1):
        b.append(b[-1] * (Fraction(1, s) + m - 1) / m)
    return b


def g_series(s: int, N: int) -> list:
    """Coefficients ``0..N`` of ``(1-z)^(-1/s) exp(sum z^k/k^2)``."""
    if s < 2:
        raise DomainError("block size s must be at least 2")
    E = min(N, EXACT_SERIES_DEGREE)
    b = inverse_root_coeffs(s, E)
    c = coeff_exp_inv_square_exact(E)
    head = [sum((b[j] * c[m - j] for j in range(m + 1)), Fraction(0)) for m in range(E + 1)]
    if N <= E:
        return head
    bf = np.ones(N + 1)
    for m in range(1, N + 1):
        bf[m] = bf[m - 1] * (1.0 / s + m - 1) / m
    cf = coeff_exp_inv_square(N)
    out = [float(x) for x in head]
    for m in range(E + 1, N + 1):
        out.append(float(np.sum(bf[: m + 1] * cf[m::-1])))
    return out


@dataclass(frozen=True)
class LargeNuBound:
    n: int
    nu: int
    s: int
    f_coeff: float
    g_coeff: float
    f_exact: Fraction | None
    g_exact: Fraction | None

    @property
    def dominated(self) -> bool:
        if self.f_exact is not None and self.g_exact is not None:
            return self.f_exact <= self.g_exact
        return self.f_coeff <= self.g_coeff


def largenu_bound(q: BlockSystemQuery) -> LargeNuBound:
    """Coefficient of ``z^nu`` in ``f(z)`` (an upper bound for ``I(n, nu)``) and in ``g(z)``."""
    s = q.block_size
    if s < 2:
        raise DomainError("block size must be at least 2")
    if q.nu > 10**5:
        raise DomainError("nu must be at most 10^5")
    f = f_series(s, q.nu)[q.nu]
    g = g_series(s, q.nu)[q.nu]
    exact = q.nu <= EXACT_SERIES_DEGREE
    return LargeNuBound(
        q.n, q.nu, s, float(f), float(g),
        f if exact else None, g if exact else None,
    )


# -- theory comparison -------------------------------------------------------


def theory_branch(q: BlockSystemQuery) -> int:
    """Which regime (1-4) of the order-of-magnitude formula applies.

    Regimes are left-closed at ``ceil(log n)`` and ``ceil(n / log n)``; the
    ``nu <= 4`` regime takes precedence.
    """
    n, nu = q.n, q.nu
    L = math.log(n)
    if nu <= 4:
        return 1
    if nu >= math.ceil(n / L):
        return 4
    if nu >= math.ceil(L):
        return 3
    return 2


def theory_I_order(q: BlockSystemQuery) -> float:
    """Order of magnitude of ``I(n, nu)`` with all implied constants set to 1."""
    n, nu = q.n, q.nu
    branch = theory_branch(q)
    if branch == 1:
        return n ** (-delta(nu)) * math.log(n) ** -1.5
    if branch == 2:
        return n ** (-1 + 1 / (nu - 1))
    if branch == 3:
        return 1.0 / n
    return n ** (-1 + nu / n)


def theory_table(pairs, cap: int = ENUMERATION_CAP, threads: int = 1) -> list:
    """Rows ``(n, nu, exact I, theory order, ratio)`` for each valid pair."""
    rows = []
    for n, nu in pairs:
        q = BlockSystemQuery(n, nu)
        exact = exact_I(q, cap, threads)
        order = theory_I_order(q)
        rows.append((n, nu, exact, order, float(exact) / order))
    return rows
