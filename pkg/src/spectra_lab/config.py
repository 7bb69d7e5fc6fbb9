"""Process-wide knobs read from the environment.

SPECLAB_NUMBA=0 forces the pure numpy/python kernels even if numba imports.
SPECLAB_BUDGET_MB overrides the per-polynomial coefficient budget (MiB).
"""
from __future__ import annotations

import os

DEFAULT_BUDGET_MB = 1.0


def use_numba() -> bool:
    flag = os.environ.get("SPECLAB_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "no", "off"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def coefficient_budget_bytes() -> int:
    raw = os.environ.get("SPECLAB_BUDGET_MB")
    mb = DEFAULT_BUDGET_MB if raw is None else float(raw)
    return int(mb * (1 << 20))
