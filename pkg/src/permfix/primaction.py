"""Wreath products ``S_m wr S_r`` in product action, induced actions on
``k``-subsets, fixed points, cycle counts and minimal degrees.

Points of ``{1..m}^r`` (or of ``Delta^r`` with ``Delta`` the ``k``-subsets of
``{1..m}``) are ranked in mixed radix with coordinate 1 most significant;
``k``-subsets are ranked colexicographically by their combinadic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from permfix import kernels
from permfix.config import POINT_CAP
from permfix.errors import CapExceededError, DomainError
from permfix.lsets import mean_and_stderr
from permfix.permcore import CycleType, Permutation, cycle_type, sample_uniform_batch


@dataclass(frozen=True)
class WreathElement:
    """``(pi_1, ..., pi_r; sigma)`` acting by ``(g x)_w = pi_w(x_{sigma^-1(w)})``."""

    base: tuple
    top: Permutation

    def __post_init__(self):
        base = tuple(self.base)
        if len(base) != self.top.n:
            raise DomainError("need one base permutation per coordinate")
        if len({p.n for p in base}) != 1:
            raise DomainError("base permutations must share a degree")
        object.__setattr__(self, "base", base)

    @property
    def m(self) -> int:
        return self.base[0].n

    @property
    def r(self) -> int:
        return self.top.n

    @classmethod
    def identity(cls, m: int, r: int) -> "WreathElement":
        return cls(tuple(Permutation.identity(m) for _ in range(r)), Permutation.identity(r))

    def __mul__(self, other: "WreathElement") -> "WreathElement":
        """``(d; q)(e; s) = (d_w e_{q^-1 w}; qs)``."""
        if (self.m, self.r) != (other.m, other.r):
            raise DomainError("wreath elements of different shape")
        qinv = self.top.inverse()
        base = tuple(self.base[w - 1] * other.base[qinv(w) - 1] for w in range(1, self.r + 1))
        return WreathElement(base, self.top * other.top)

    def is_identity(self) -> bool:
        return self.top.is_identity() and all(p.is_identity() for p in self.base)


def random_wreath_element(m: int, r: int, rng: np.random.Generator) -> WreathElement:
    base = tuple(Permutation.from_zero_based(rng.permutation(m)) for _ in range(r))
    return WreathElement(base, Permutation.from_zero_based(rng.permutation(r)))


def wreath_apply(g: WreathElement, x: Sequence) -> tuple:
    """Apply ``g`` to a point of ``{1..m}^r`` or to an ``r``-tuple of subsets."""
    x = tuple(x)
    if len(x) != g.r:
        raise DomainError(f"point has {len(x)} coordinates, expected {g.r}")
    sinv = g.top.inverse()
    out = []
    for w in range(1, g.r + 1):
        coord = x[sinv(w) - 1]
        pi = g.base[w - 1]
        if isinstance(coord, (frozenset, set, tuple)):
            if any(not 1 <= v <= g.m for v in coord):
                raise DomainError("subset entries must lie in 1..m")
            out.append(frozenset(pi(v) for v in coord))
        else:
            if not 1 <= coord <= g.m:
                raise DomainError("coordinates must lie in 1..m")
            out.append(pi(coord))
    return tuple(out)


# -- k-subset ranking --------------------------------------------------------


def kset_rank(subset) -> int:
    """Colexicographic rank of a set of zero-based points."""
    return sum(math.comb(x, i) for i, x in enumerate(sorted(subset), 1))


def kset_unrank(rank: int, k: int) -> tuple:
    out = []
    for i in range(k, 0, -1):
        x = i - 1
        while math.comb(x + 1, i) <= rank:
            x += 1
        out.append(x)
        rank -= math.comb(x, i)
    return tuple(reversed(out))


@lru_cache(maxsize=64)
def _ksets(m: int, k: int) -> tuple:
    return tuple(kset_unrank(i, k) for i in range(math.comb(m, k)))


def induced_kset_image(p: Permutation, k: int, cap: int = POINT_CAP) -> np.ndarray:
    """Zero-based image array of ``p`` acting on colex-ranked ``k``-subsets."""
    m = p.n
    if not 1 <= k <= m:
        raise DomainError("need 1 <= k <= m")
    if math.comb(m, k) > cap:
        raise CapExceededError(f"binom({m},{k}) exceeds cap {cap}")
    img = p.zero_based()
    return np.array([kset_rank(img[list(s)]) for s in _ksets(m, k)], dtype=np.int64)


def fixed_ksets(p: Permutation, k: int) -> int:
    """``k``-subsets fixed by ``p``: unions of cycles of total size ``k``."""
    poly = [1] + [0] * k
    for cyc in p.cycles():
        ell = len(cyc)
        for t in range(k, ell - 1, -1):
            poly[t] += poly[t - ell]
    return poly[k]


def kset_cycle_count(p: Permutation, k: int, cap: int = POINT_CAP) -> int:
    """Number of orbits of ``<p>`` on ``k``-subsets."""
    return kernels.count_cycles(induced_kset_image(p, k, cap))


# -- product action ----------------------------------------------------------


def wreath_action_image(g: WreathElement, k: int | None = None, cap: int = POINT_CAP) -> np.ndarray:
    """Image array of ``g`` on ``{1..m}^r`` (``k=None``) or on ``Delta^r``."""
    M = g.m if k is None else math.comb(g.m, k)
    if M**g.r > cap:
        raise CapExceededError(f"{M}^{g.r} points exceed cap {cap}")
    if k is None:
        base = np.stack([p.zero_based() for p in g.base])
    else:
        base = np.stack([induced_kset_image(p, k, cap) for p in g.base])
    return kernels.product_action(base, g.top.zero_based())


def wreath_fixed_points(g: WreathElement, k: int, mode: str = "auto", cap: int = POINT_CAP) -> int:
    """Fixed points of ``g`` on ``Delta^r``.

    ``mode="formula"`` (only for trivial top part) multiplies per-coordinate
    fixed ``k``-set counts; ``"exhaustive"`` scans all points; ``"auto"``
    picks the formula whenever it applies.
    """
    if not 1 <= k < g.m:
        raise DomainError("need 1 <= k < m")
    if mode not in ("auto", "formula", "exhaustive"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "formula" or (mode == "auto" and g.top.is_identity()):
        if not g.top.is_identity():
            raise DomainError("formula mode needs a trivial top permutation")
        return math.prod(fixed_ksets(p, k) for p in g.base)
    return kernels.count_fixed(wreath_action_image(g, k, cap))


def wreath_cycle_count(g: WreathElement, cap: int = POINT_CAP) -> int:
    """Number of orbits of ``<g>`` on ``{1..m}^r``."""
    return kernels.count_cycles(wreath_action_image(g, None, cap))


def _binom(a: int, b: int) -> int:
    return math.comb(a, b) if 0 <= b <= a else 0


def product_action_degree_forms(m: int, k: int, r: int) -> tuple:
    """Both closed forms of the minimal degree of ``S_m wr S_r`` on ``Delta^r``.

    ``binom(m,k)^r - (binom(m-2,k) + binom(m-2,k-2)) binom(m,k)^(r-1)`` and
    ``2k(m-k)/(m(m-1)) binom(m,k)^r``.
    """
    if m < 2 or not 1 <= k <= m - 1 or r < 1:
        raise DomainError("need m >= 2, 1 <= k <= m-1, r >= 1")
    N = math.comb(m, k)
    first = N**r - (_binom(m - 2, k) + _binom(m - 2, k - 2)) * N ** (r - 1)
    second = Fraction(2 * k * (m - k), m * (m - 1)) * N**r
    return first, second


def minimal_degree_product_action(m: int, k: int, r: int) -> int:
    if m < 5:
        raise DomainError("m must be at least 5")
    first, second = product_action_degree_forms(m, k, r)
    if first != second:
        raise ArithmeticError(f"closed forms disagree: {first} != {second}")
    return first


def iter_wreath_elements(m: int, r: int):
    perms_m = [Permutation(p) for p in itertools.permutations(range(1, m + 1))]
    perms_r = [Permutation(p) for p in itertools.permutations(range(1, r + 1))]
    for top in perms_r:
        for base in itertools.product(perms_m, repeat=r):
            yield WreathElement(base, top)


def exhaustive_minimal_degree(m: int, k: int, r: int, cap: int = POINT_CAP) -> int:
    """Least number of points of ``Delta^r`` moved by a nontrivial element, by full sweep."""
    N = math.comb(m, k)
    if math.factorial(m) ** r * math.factorial(r) * N**r > cap * 100:
        raise CapExceededError("group too large for an exhaustive sweep")
    perms_m = [Permutation(p) for p in itertools.permutations(range(1, m + 1))]
    images = [induced_kset_image(p, k) for p in perms_m]
    identity_m = perms_m[0].is_identity()
    points = N**r
    best = points
    for top in itertools.permutations(range(r)):
        sigma = np.array(top, dtype=np.int64)
        trivial_top = list(top) == list(range(r))
        for combo in itertools.product(range(len(perms_m)), repeat=r):
            if trivial_top and identity_m and all(i == 0 for i in combo):
                continue
            base = np.stack([images[i] for i in combo])
            moved = points - kernels.count_fixed(kernels.product_action(base, sigma))
            best = min(best, moved)
    return best


# -- minimal degree of a cyclic group ----------------------------------------


def _prime_factors(x: int) -> set:
    out = set()
    p = 2
    while p * p <= x:
        while x % p == 0:
            out.add(p)
            x //= p
        p += 1
    if x > 1:
        out.add(x)
    return out


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def minimal_degree_from_counts(counts: Sequence[int]) -> int:
    """Minimal degree of ``<pi>`` from the cycle type of ``pi``.

    A nontrivial power ``pi^t`` fixes exactly the ``j``-cycles with ``j | t``,
    so the most points are fixed by ``t = order / p`` for a prime ``p``. For
    that power the moved points are the ``j``-cycles with maximal ``p``-adic
    valuation.
    """
    lengths = [j for j, c in enumerate(counts, 1) if c and j > 1]
    if not lengths:
        raise DomainError("the identity has no minimal degree")
    primes = set().union(*(_prime_factors(j) for j in lengths))
    best = None
    for p in primes:
        top = max(_valuation(j, p) for j in lengths)
        moved = sum(j * counts[j - 1] for j in lengths if _valuation(j, p) == top)
        best = moved if best is None else min(best, moved)
    return best


def minimal_degree_cyclic(p: Permutation | CycleType) -> int:
    counts = p.counts if isinstance(p, CycleType) else cycle_type(p).counts
    return minimal_degree_from_counts(counts)


def minimal_degree_by_powers(p: Permutation) -> int:
    """Direct minimum of moved points over ``p^t``, ``1 <= t < order``."""
    if p.is_identity():
        raise DomainError("the identity has no minimal degree")
    order = p.order()
    best = p.n
    power = p
    for _ in range(1, order):
        best = min(best, power.moved_points())
        power = power * p
    return best


def mc_minimal_degree(n: int, alpha: float, trials: int, rng: np.random.Generator) -> tuple:
    """``(estimate, stderr)`` of P(pi != 1 and <pi> has minimal degree >= n^alpha)."""
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if trials < 2:
        raise DomainError("trials must be at least 2")
    threshold = n**alpha
    types = kernels.cycle_type_rows(sample_uniform_batch(n, trials, rng))[:, 1:]
    uniq, inverse = np.unique(types, axis=0, return_inverse=True)
    hit = np.zeros(len(uniq))
    for i, row in enumerate(uniq):
        counts = [int(x) for x in row]
        if counts[0] == n:
            continue
        hit[i] = minimal_degree_from_counts(counts) >= threshold
    return mean_and_stderr(hit[np.asarray(inverse).reshape(-1)])
