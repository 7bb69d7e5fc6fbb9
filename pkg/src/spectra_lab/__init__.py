"""Multiplier spectra, length spectra and critical-orbit arithmetic of rational maps over Q."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BadReduction,
    BudgetExceeded,
    DegeneratePair,
    DegreeTooSmall,
    HenselCrossCheckFailed,
    InternalAssertion,
    InvalidInput,
    NoNonPreperiodicCritical,
    NonConvergence,
    SpectraError,
)
from .rational_map import INFINITY, Mobius, RationalMap, conjugate, iterate, parse_normalize  # noqa: E402

__all__ = [
    "__version__",
    "BadReduction",
    "BudgetExceeded",
    "DegeneratePair",
    "DegreeTooSmall",
    "HenselCrossCheckFailed",
    "INFINITY",
    "InternalAssertion",
    "InvalidInput",
    "Mobius",
    "NoNonPreperiodicCritical",
    "NonConvergence",
    "RationalMap",
    "SpectraError",
    "conjugate",
    "iterate",
    "parse_normalize",
]
