"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels`` is used. Setting the environment
variable ``PERMFIX_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

from permfix import _pykernels

if os.environ.get("PERMFIX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from permfix import _ckernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

cycle_type_rows = _impl.cycle_type_rows
preserves_any_partition = _impl.preserves_any_partition
product_action = _impl.product_action
count_cycles = _impl.count_cycles
count_fixed = _impl.count_fixed


def backends() -> dict:
    """Map backend name to module for every backend importable here."""
    out = {"python": _pykernels}
    try:
        from permfix import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


__all__ = [
    "BACKEND",
    "backends",
    "count_cycles",
    "count_fixed",
    "cycle_type_rows",
    "preserves_any_partition",
    "product_action",
]
