"""Exact univariate polynomials over Z, Q, F_p and F_{p^k}."""
from __future__ import annotations

from .factor import Factorization, factor_over_Z
from .intpoly import (
    IntPoly,
    NotDivisible,
    RatPoly,
    divides,
    exact_quotient,
    resultant,
    squarefree_decomposition,
    squarefree_part,
    subresultant_gcd,
    sylvester_determinant,
)
from .modp import BadLeadingReduction, FpkElem, factor_mod_p, roots_in_Fpk

__all__ = [
    "BadLeadingReduction",
    "Factorization",
    "FpkElem",
    "IntPoly",
    "NotDivisible",
    "RatPoly",
    "divides",
    "exact_quotient",
    "factor_mod_p",
    "factor_over_Z",
    "resultant",
    "roots_in_Fpk",
    "squarefree_decomposition",
    "squarefree_part",
    "subresultant_gcd",
    "sylvester_determinant",
]
