"""Exact, brute-force and Monte Carlo tools for invariant sets, block
systems and minimal degrees of random permutations."""
from __future__ import annotations

from permfix.blocksys import (
    BlockSystemQuery,
    brute_force_I,
    delta,
    dominant_partition,
    exact_I,
    largenu_bound,
    mc_I,
    theory_I_order,
)
from permfix.errors import (
    CapExceededError,
    DivisibilityError,
    DomainError,
    InconsistencyError,
    PermfixError,
)
from permfix.fixedsets import KDVectors, brute_force_i, exact_i, f_divisible, feasible, mc_i
from permfix.kernels import BACKEND
from permfix.lsets import TupleSet, g_bound, lset, lset_star
from permfix.permcore import CycleType, PartialCycleType, Permutation, cycle_type, enumerate_cycle_types
from permfix.primaction import (
    WreathElement,
    kset_cycle_count,
    minimal_degree_cyclic,
    minimal_degree_product_action,
    wreath_fixed_points,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockSystemQuery",
    "CapExceededError",
    "CycleType",
    "DivisibilityError",
    "DomainError",
    "InconsistencyError",
    "KDVectors",
    "PartialCycleType",
    "PermfixError",
    "Permutation",
    "TupleSet",
    "WreathElement",
    "brute_force_I",
    "brute_force_i",
    "cycle_type",
    "delta",
    "dominant_partition",
    "enumerate_cycle_types",
    "exact_I",
    "exact_i",
    "f_divisible",
    "feasible",
    "g_bound",
    "kset_cycle_count",
    "largenu_bound",
    "lset",
    "lset_star",
    "mc_I",
    "mc_i",
    "minimal_degree_cyclic",
    "minimal_degree_product_action",
    "theory_I_order",
    "wreath_fixed_points",
]
