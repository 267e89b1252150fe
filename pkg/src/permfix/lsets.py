"""Sets of achievable class totals when cycles are split among ``m`` classes.

For a cycle-count vector ``c`` the set ``L_m(c)`` collects the vectors
``(sum_j j*x_1j, ..., sum_j j*x_mj)`` over all nonnegative integer matrices
with column sums ``c_j``. Every such vector sums to ``S(c)``, so only the
first ``m - 1`` coordinates are stored.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from permfix.config import LSET_STAR_CAP, TUPLE_BUDGET, TUPLE_BUDGET_CEILING
from permfix.errors import CapExceededError, DomainError
from permfix.permcore import PartialCycleType, poisson_counts_batch

# bitset DP is used while the encoded range fits in this many bits
_BITSET_LIMIT = 1 << 27


@dataclass(frozen=True)
class TupleSet:
    m: int
    total: int
    tuples: frozenset

    @property
    def size(self) -> int:
        return len(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __contains__(self, vec) -> bool:
        vec = tuple(vec)
        if len(vec) == self.m:
            if sum(vec) != self.total:
                return False
            vec = vec[:-1]
        return vec in self.tuples

    def full_tuples(self) -> list:
        """Sorted ``m``-tuples, restoring the implicit last coordinate."""
        return [t + (self.total - sum(t),) for t in sorted(self.tuples)]

    def to_json(self) -> str:
        return json.dumps(
            {"m": self.m, "total": self.total, "tuples": [list(t) for t in sorted(self.tuples)]}
        )


def _counts(c) -> tuple:
    if isinstance(c, PartialCycleType):
        return c.counts
    counts = tuple(int(x) for x in c)
    if any(x < 0 for x in counts):
        raise DomainError("cycle counts must be nonnegative")
    return counts


def _check_m(m: int):
    if m < 2:
        raise DomainError("m must be at least 2")


def projected_compositions(c: int, m: int) -> list:
    """Compositions of ``c`` into ``m`` parts, keeping the first ``m - 1``.

    Colexicographic order (last coordinate varies slowest).
    """
    out = []
    for tup in itertools.product(range(c + 1), repeat=m - 1):
        if sum(tup) <= c:
            out.append(tup[::-1])
    return out


def _encode(vec: Sequence[int], base: int) -> int:
    code = 0
    for x in reversed(vec):
        code = code * base + x
    return code


def _decode(code: int, base: int, dim: int) -> tuple:
    out = []
    for _ in range(dim):
        code, x = divmod(code, base)
        out.append(x)
    return tuple(out)


def _offsets(j: int, cj: int, m: int, base: int) -> list:
    return [_encode([j * x for x in comp], base) for comp in projected_compositions(cj, m)]


def _lset_codes_bitset(counts: tuple, m: int, base: int, budget: int) -> int:
    bits = 1
    for j, cj in enumerate(counts, 1):
        if not cj:
            continue
        new = 0
        for off in _offsets(j, cj, m, base):
            new |= bits << off
        bits = new
        if bits.bit_count() > budget:
            raise CapExceededError(f"tuple set exceeds budget {budget}")
    return bits


def _lset_codes_set(counts: tuple, m: int, base: int, budget: int) -> set:
    cur = {0}
    for j, cj in enumerate(counts, 1):
        if not cj:
            continue
        offs = _offsets(j, cj, m, base)
        new = set()
        for t in cur:
            new.update(t + o for o in offs)
            if len(new) > budget:
                raise CapExceededError(f"tuple set exceeds budget {budget}")
        cur = new
    return cur


def _iter_bits(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def lset(c, m: int, budget: int = TUPLE_BUDGET) -> TupleSet:
    """Build ``L_m(c)`` (projected) by dynamic programming over lengths ``j``.

    Lengths are processed in increasing order; at each step the current set
    is convolved with ``j`` times every composition of ``c_j`` into ``m``
    parts.
    """
    _check_m(m)
    counts = _counts(c)
    total = sum(j * cj for j, cj in enumerate(counts, 1))
    base = total + 1
    dim = m - 1
    if base**dim <= _BITSET_LIMIT:
        codes = _iter_bits(_lset_codes_bitset(counts, m, base, budget))
    else:
        codes = _lset_codes_set(counts, m, base, budget)
    return TupleSet(m, total, frozenset(_decode(code, base, dim) for code in codes))


def lset_size(c, m: int, budget: int = TUPLE_BUDGET) -> int:
    """``|L_m(c)|`` via the same DP, without decoding the tuples."""
    _check_m(m)
    counts = _counts(c)
    total = sum(j * cj for j, cj in enumerate(counts, 1))
    base = total + 1
    if base ** (m - 1) <= _BITSET_LIMIT:
        return _lset_codes_bitset(counts, m, base, budget).bit_count()
    return len(_lset_codes_set(counts, m, base, budget))


def multiplicity_vector(a: Sequence[int]) -> tuple:
    """``c_i`` = number of entries of ``a`` equal to ``i``."""
    if not a:
        return ()
    counts = [0] * max(a)
    for x in a:
        counts[x - 1] += 1
    return tuple(counts)


def lset_star(a: Sequence[int], m: int, cap: int = LSET_STAR_CAP) -> TupleSet:
    """Projected class totals over all ordered partitions of the labeled list ``a``.

    Each entry is placed in one of the ``m`` classes in turn; equal entries
    are not merged, unlike :func:`lset`.
    """
    _check_m(m)
    a = tuple(int(x) for x in a)
    if any(x < 1 for x in a):
        raise DomainError("lengths must be positive")
    if len(a) > cap:
        raise CapExceededError(f"r={len(a)} exceeds cap {cap}")
    dim = m - 1
    cur = {(0,) * dim}
    for x in a:
        nxt = set(cur)
        for t in cur:
            for i in range(dim):
                nxt.add(t[:i] + (t[i] + x,) + t[i + 1 :])
        cur = nxt
    return TupleSet(m, sum(a), frozenset(cur))


def g_bound(a: Sequence[int], m: int) -> int:
    """``min_j (1 + a~_1 + ... + a~_j)^(m-1) * m^(r-j)`` over the sorted list ``a~``."""
    _check_m(m)
    srt = sorted(int(x) for x in a)
    r = len(srt)
    best = m**r
    partial = 0
    for j, x in enumerate(srt, 1):
        partial += x
        best = min(best, (1 + partial) ** (m - 1) * m ** (r - j))
    return best


def binomial_product_bound(c, m: int) -> int:
    """``prod_j binom(m + c_j - 1, c_j)``, the count of per-length compositions."""
    return math.prod(math.comb(m + cj - 1, cj) for cj in _counts(c))


def _size_with_retry(counts: tuple, m: int, budget: int) -> int:
    # a draw that overflows the budget is recomputed at a higher tier, never dropped
    tier = budget
    while True:
        try:
            return lset_size(counts, m, tier)
        except CapExceededError:
            if tier >= TUPLE_BUDGET_CEILING:
                raise
            tier = min(tier * 10, TUPLE_BUDGET_CEILING)


def lset_sizes_for_draws(draws: np.ndarray, m: int, budget: int = TUPLE_BUDGET) -> np.ndarray:
    """``|L_m(row)|`` for each row of a count matrix (rows deduplicated first)."""
    uniq, inverse = np.unique(draws, axis=0, return_inverse=True)
    sizes = np.array(
        [_size_with_retry(tuple(int(x) for x in row), m, budget) for row in uniq], dtype=float
    )
    return sizes[np.asarray(inverse).reshape(-1)]


def mean_and_stderr(values: np.ndarray) -> tuple:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise DomainError("need at least two samples")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def expected_lset_size(
    k: int, m: int, trials: int, rng: np.random.Generator, budget: int = TUPLE_BUDGET
) -> tuple:
    """Monte Carlo ``E|L_m(X_k)|`` with ``X_j ~ Poisson(1/j)`` independent.

    Returns ``(estimate, stderr)``.
    """
    _check_m(m)
    if trials < 2:
        raise DomainError("trials must be at least 2")
    draws = poisson_counts_batch(k, trials, rng)
    return mean_and_stderr(lset_sizes_for_draws(draws, m, budget))
