"""Permutations, cycle types, partitions and exact class weights.

Permutations use 1-indexed semantics: ``images[x - 1]`` is the image of
``x``. The numeric kernels work on zero-based arrays; use
:meth:`Permutation.zero_based` to cross over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from permfix import kernels
from permfix.config import ENUMERATION_CAP
from permfix.errors import CapExceededError, DomainError, InconsistencyError

IntegerPartition = tuple  # nonincreasing tuple of positive ints
ExactProbability = Fraction


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        n = len(images)
        if n < 1:
            raise DomainError("a permutation needs n >= 1")
        if sorted(images) != list(range(1, n + 1)):
            raise DomainError(f"not a bijection of 1..{n}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                images[a - 1] = b
        return cls(tuple(images))

    @classmethod
    def from_zero_based(cls, arr) -> "Permutation":
        return cls(tuple(int(v) + 1 for v in arr))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """``(p * q)(x) == p(q(x))``."""
        if other.n != self.n:
            raise DomainError("degree mismatch")
        return Permutation(tuple(self.images[y - 1] for y in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for x, y in enumerate(self.images, 1):
            inv[y - 1] = x
        return Permutation(tuple(inv))

    def __pow__(self, t: int) -> "Permutation":
        if t < 0:
            return self.inverse() ** (-t)
        result, base = Permutation.identity(self.n), self
        while t:
            if t & 1:
                result = result * base
            base = base * base
            t >>= 1
        return result

    def is_identity(self) -> bool:
        return all(y == x for x, y in enumerate(self.images, 1))

    def cycles(self) -> list:
        seen = [False] * (self.n + 1)
        out = []
        for x in range(1, self.n + 1):
            if seen[x]:
                continue
            cyc = []
            y = x
            while not seen[y]:
                seen[y] = True
                cyc.append(y)
                y = self.images[y - 1]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()))

    def moved_points(self) -> int:
        return sum(1 for x, y in enumerate(self.images, 1) if x != y)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.int64) - 1

    def __str__(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


@dataclass(frozen=True)
class PartialCycleType:
    """Counts ``c_1..c_k`` of cycles of each length up to a support bound ``k``."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise DomainError("cycle counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def k(self) -> int:
        return len(self.counts)

    def __getitem__(self, j: int) -> int:
        """``c[j]`` is the number of ``j``-cycles (1-indexed, 0 past the end)."""
        return self.counts[j - 1] if 1 <= j <= len(self.counts) else 0

    @property
    def total(self) -> int:
        return sum(j * c for j, c in enumerate(self.counts, 1))

    def lengths(self) -> tuple:
        """Cycle lengths as a nonincreasing tuple."""
        return tuple(j for j in range(self.k, 0, -1) for _ in range(self.counts[j - 1]))

    def weight(self) -> int:
        """``prod_j c_j! j^c_j``: the centralizer order for a full cycle type."""
        return class_weight(self.counts)

    def __add__(self, other: "PartialCycleType") -> "PartialCycleType":
        k = max(self.k, other.k)
        return PartialCycleType(tuple(self[j] + other[j] for j in range(1, k + 1)))


@dataclass(frozen=True)
class CycleType(PartialCycleType):
    """A full cycle type of ``S_n``; ``counts`` has length exactly ``n``."""

    def __post_init__(self):
        super().__post_init__()
        n = self.total
        if n < 1:
            raise DomainError("a cycle type needs n >= 1")
        counts = self.counts[:n] + (0,) * (n - len(self.counts))
        if any(self.counts[n:]):
            raise InconsistencyError("counts beyond n must be zero")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    @classmethod
    def from_lengths(cls, lengths: Sequence[int]) -> "CycleType":
        n = sum(lengths)
        counts = [0] * n
        for j in lengths:
            counts[j - 1] += 1
        return cls(tuple(counts))

    def probability(self) -> Fraction:
        """Proportion of ``S_n`` with this cycle type."""
        return Fraction(1, self.weight())


def class_weight(counts: Sequence[int]) -> int:
    w = 1
    for j, c in enumerate(counts, 1):
        if c:
            w *= math.factorial(c) * j**c
    return w


def cycle_type(p: Permutation) -> CycleType:
    counts = [0] * p.n
    for cyc in p.cycles():
        counts[len(cyc) - 1] += 1
    return CycleType(tuple(counts))


def iter_partitions(v: int) -> Iterator[tuple]:
    """Partitions of ``v`` in reverse-lexicographic order, e.g. 3, 21, 111."""
    if v < 1:
        raise DomainError("v must be positive")
    a = [v]
    while True:
        yield tuple(a)
        rem = 0
        while a and a[-1] == 1:
            a.pop()
            rem += 1
        if not a:
            return
        x = a[-1] - 1
        a[-1] = x
        rem += 1
        while rem > x:
            a.append(x)
            rem -= x
        if rem:
            a.append(rem)


def partitions_of(v: int) -> list:
    return list(iter_partitions(v))


def partition_to_counts(parts: Sequence[int], n: int | None = None) -> tuple:
    n = sum(parts) if n is None else n
    counts = [0] * n
    for j in parts:
        counts[j - 1] += 1
    return tuple(counts)


def enumerate_cycle_types(n: int, cap: int = ENUMERATION_CAP) -> Iterator[tuple]:
    """Yield ``(CycleType, probability)`` for every cycle type of ``S_n``.

    Order is reverse-lexicographic in the cycle-length partition, so the
    stream starts with the ``n``-cycle and ends with the identity. The
    probabilities are exact and sum to 1.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if n > cap:
        raise CapExceededError(f"n={n} exceeds enumeration cap {cap}")
    for parts in iter_partitions(n):
        counts = partition_to_counts(parts, n)
        yield CycleType(counts), Fraction(1, class_weight(counts))


def stats(c: PartialCycleType | Sequence[int]) -> tuple:
    """``(S, C+, C-)``; ``C-`` is ``math.inf`` when every count is zero."""
    counts = c.counts if isinstance(c, PartialCycleType) else tuple(c)
    support = [j for j, cj in enumerate(counts, 1) if cj > 0]
    S = sum(j * cj for j, cj in enumerate(counts, 1))
    if not support:
        return S, 0, math.inf
    return S, support[-1], support[0]


# -- random sampling ---------------------------------------------------------


def make_rng(seed: int | None) -> np.random.Generator:
    """PCG64 generator; ``None`` draws fresh OS entropy."""
    return np.random.default_rng(seed)


def spawn_rngs(seed: int, count: int) -> list:
    """Independent child streams derived from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_uniform(n: int, rng: np.random.Generator) -> Permutation:
    if n < 1:
        raise DomainError("n must be positive")
    return Permutation.from_zero_based(rng.permutation(n))


def sample_uniform_batch(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``(size, n)`` array of independent uniform zero-based permutations."""
    if n < 1:
        raise DomainError("n must be positive")
    return rng.permuted(np.tile(np.arange(n, dtype=np.int64), (size, 1)), axis=1)


def cycle_types_of(perms: np.ndarray) -> np.ndarray:
    """Batch cycle types: row ``i``, column ``j`` counts ``j``-cycles."""
    return kernels.cycle_type_rows(perms)


_POISSON_MAX_STEPS = 64


def poisson_counts_batch(k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``(size, k)`` array with column ``j-1`` drawn from Poisson(1/j).

    Inverse-CDF sampling; all rates are at most 1 so the search is short.
    """
    if k < 1:
        raise DomainError("k must be positive")
    lam = 1.0 / np.arange(1, k + 1)
    u = rng.random((size, k))
    x = np.zeros((size, k), dtype=np.int64)
    pmf = np.broadcast_to(np.exp(-lam), (size, k)).copy()
    cdf = pmf.copy()
    lam_full = np.broadcast_to(lam, (size, k))
    for _ in range(_POISSON_MAX_STEPS):
        active = u > cdf
        if not active.any():
            break
        x[active] += 1
        pmf[active] *= lam_full[active] / x[active]
        cdf[active] += pmf[active]
    return x


def sample_poisson_counts(k: int, rng: np.random.Generator) -> PartialCycleType:
    return PartialCycleType(tuple(poisson_counts_batch(k, 1, rng)[0]))


# -- exact counts ------------------------------------------------------------


@lru_cache(maxsize=None)
def _no_short_cycles_table(k: int, upto: int) -> tuple:
    # A[t] = permutations of t points with every cycle longer than k
    A = [1] + [0] * upto
    for t in range(1, upto + 1):
        total = 0
        falling = 1  # (t-1)!/(t-j)!
        for j in range(1, t + 1):
            if j > 1:
                falling *= t - j + 1
            if j > k:
                total += falling * A[t - j]
        A[t] = total
    return tuple(A)


def count_no_short_cycles(n: int, k: int) -> int:
    """Permutations of ``n`` points all of whose cycles are longer than ``k``."""
    if n < 0 or k < 0:
        raise DomainError("n and k must be nonnegative")
    return _no_short_cycles_table(k, n)[n]


def count_prescribed_small_cycles(n: int, c, k: int) -> int:
    """Number of ``pi`` in ``S_n`` with exactly ``c_i`` ``i``-cycles for each ``i <= k``."""
    counts = c.counts if isinstance(c, PartialCycleType) else tuple(int(x) for x in c)
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    if k > n:
        raise DomainError(f"k={k} exceeds n={n}")
    if any(counts[k:]):
        raise DomainError("c has support beyond k")
    counts = counts[:k] + (0,) * (k - len(counts[:k]))
    S = sum(j * cj for j, cj in enumerate(counts, 1))
    if S > n:
        raise InconsistencyError(f"S(c)={S} exceeds n={n}")
    small = math.factorial(S) // class_weight(counts)
    return math.comb(n, S) * small * count_no_short_cycles(n - S, k)
