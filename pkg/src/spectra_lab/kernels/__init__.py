"""Hot loops with two interchangeable implementations.

The compiled numba backend is used when numba imports and SPECLAB_NUMBA is
not "0"; otherwise the pure numpy module is loaded. Both expose the same
functions with the same contracts, so callers never branch on the backend.
"""
from __future__ import annotations

import importlib
from types import ModuleType

from ..config import use_numba

KERNEL_NAMES = (
    "poly_rem_mod",
    "poly_mulmod",
    "poly_invmod",
    "charpoly_mult_mod",
    "aberth_poly",
    "aberth_fixed_points",
    "backward_orbit",
    "orbit_mod_p",
)


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module "numba" or "numpy" (default: per environment)."""
    if name is None:
        name = "numba" if use_numba() else "numpy"
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    return importlib.import_module(f"._{name}", __name__)


_backend = get_backend()
BACKEND = "numba" if _backend.__name__.endswith("_numba") else "numpy"

poly_rem_mod = _backend.poly_rem_mod
poly_mulmod = _backend.poly_mulmod
poly_invmod = _backend.poly_invmod
charpoly_mult_mod = _backend.charpoly_mult_mod
aberth_poly = _backend.aberth_poly
aberth_fixed_points = _backend.aberth_fixed_points
backward_orbit = _backend.backward_orbit
orbit_mod_p = _backend.orbit_mod_p
