"""Periodic-point forms, multiplier polynomials, Galois classes, length spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BudgetExceeded, InternalAssertion, InvalidInput
from .exact_poly import (
    IntPoly,
    NotDivisible,
    exact_quotient,
    factor_over_Z,
    resultant,
    squarefree_part,
    subresultant_gcd,
)
from .exact_poly.primes import descending_primes
from .rational_map import (
    INFINITY,
    BinaryForm,
    Mobius,
    RationalMap,
    conjugate,
    derivative_parts,
    homogeneous_forms_iterate,
    iterate,
)
from .roots import complex_roots

DIRECT_DEGREE_LIMIT = 24
RL_STAR_MAX_M = 3
_STABLE_PRIMES = 2
_LIFT_MARGIN_BITS = 40


# -- periodic-point forms ------------------------------------------------------------

@lru_cache(maxsize=128)
def _iterate_pair(f: RationalMap, n: int) -> tuple:
    return homogeneous_forms_iterate(f, n)


@lru_cache(maxsize=128)
def fixed_point_form(f: RationalMap, n: int) -> BinaryForm:
    """Phi_n = X Y_n - Y X_n: all fixed points of f^n in P^1, degree d^n + 1."""
    if n < 1:
        raise InvalidInput("period must be >= 1")
    X, Y = _iterate_pair(f, n)
    phi = IntPoly.x() * Y - X
    return BinaryForm.from_affine(phi, f.degree ** n + 1)


def _proper_divisors(n: int) -> list:
    return [m for m in range(1, n) if n % m == 0]


def _exact_period_of_infinity(f: RationalMap, n: int) -> int | None:
    z = INFINITY
    for k in range(1, n + 1):
        z = f(z)
        if z is INFINITY:
            return k
    return None


@lru_cache(maxsize=128)
def exact_period_form(f: RationalMap, n: int) -> BinaryForm:
    """E_n = Phi_n / prod_{m | n, m < n} E_m when the division is exact.

    Otherwise the squarefree part of Phi_n with lower-period factors removed
    is returned and the form carries the flag "division-fallback".
    """
    phi = fixed_point_form(f, n)
    divs = _proper_divisors(n)
    if not divs:
        return phi
    lower = [exact_period_form(f, m) for m in divs]
    den = IntPoly.const(1)
    inf = phi.infinity_multiplicity()
    deg = phi.degree
    for e in lower:
        den = den * e.affine()
        inf -= e.infinity_multiplicity()
        deg -= e.degree
    if inf >= 0:
        try:
            q = exact_quotient(phi.affine(), den)
            return BinaryForm.from_affine(q, deg)
        except NotDivisible:
            pass
    s = squarefree_part(phi.affine())
    for m in divs:
        g = subresultant_gcd(s, squarefree_part(fixed_point_form(f, m).affine()))
        if g.degree() > 0:
            s = exact_quotient(s, g)
    inf_exact = 1 if _exact_period_of_infinity(f, n) == n else 0
    return BinaryForm.from_affine(s, s.degree() + inf_exact, flags=("division-fallback",))


def conjugation_constant(f: RationalMap, n: int) -> int:
    """First c in 0, 1, -1, 2, -2, ... that is not a fixed point of f^n."""
    phi = fixed_point_form(f, n).affine()
    k = 0
    while True:
        for c in ((0,) if k == 0 else (k, -k)):
            if phi(c) != 0:
                return c
        k += 1


def _form(f, n, exact_only):
    return exact_period_form(f, n) if exact_only else fixed_point_form(f, n)


def infinity_free_model(f: RationalMap, n: int, exact_only: bool = False) -> tuple:
    """(g, c): g = f itself (c None) or conjugated by z -> 1/(z - c) so that no
    root of the chosen period-n form of g lies at infinity."""
    if _form(f, n, exact_only).infinity_multiplicity() == 0:
        return f, None
    c = conjugation_constant(f, n)
    g = conjugate(f, Mobius(0, 1, 1, -c))
    if _form(g, n, exact_only).infinity_multiplicity() != 0:  # pragma: no cover
        raise InternalAssertion("conjugation failed to move infinity off Fix(f^n)")
    return g, c


# -- multiplier polynomials --------------------------------------------------------------

def multiplier_polynomial(f: RationalMap, n: int, exact_only: bool = True,
                          method: str = "auto") -> IntPoly:
    """sigma(lambda) = Res_z(form, lambda B_n - A_n), primitive, where (f^n)' = A_n/B_n.

    method: "direct" (exact resultants at integer lambda, then interpolation),
    "modular" (characteristic polynomial of multiplication by A_n/B_n modulo
    the form, over many primes, CRT and reconstruction) or "auto".
    """
    return _multiplier_polynomial(f, n, bool(exact_only), method)


@lru_cache(maxsize=128)
def _multiplier_polynomial(f, n, exact_only, method):
    if method not in ("auto", "direct", "modular"):
        raise InvalidInput(f"unknown method {method!r}")
    g, _ = infinity_free_model(f, n, exact_only)
    E = _form(g, n, exact_only).affine()
    if E.degree() < 1:
        return IntPoly.const(1)
    A, B = derivative_parts(iterate(g, n))
    if method == "auto":
        method = "direct" if E.degree() <= DIRECT_DEGREE_LIMIT else "modular"
    if method == "direct":
        return sigma_direct(E, A, B)
    return sigma_modular(E, A, B)


def sigma_direct(E: IntPoly, A: IntPoly, B: IntPoly) -> IntPoly:
    D = E.degree()
    xs = list(range(D + 1))
    m = max(A.degree(), B.degree())

    def res_formal(t):
        # resultant with lambda B - A taken at its generic degree m, so that
        # a cancelling leading term at special t does not change the scaling
        b = B * t - A
        drop = m - b.degree()
        return resultant(E, b) * ((-1) ** (D * drop)) * E.lc() ** drop

    ys = [Fraction(res_formal(t)) for t in xs]
    # Newton divided differences, then expand to the monomial basis
    coef = list(ys)
    for j in range(1, D + 1):
        for i in range(D, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * (D + 1)
    basis = [Fraction(1)]
    for j in range(D + 1):
        for i, b in enumerate(basis):
            poly[i] += coef[j] * b
        basis = [Fraction(0)] + basis
        for i in range(len(basis) - 1):
            basis[i] -= xs[j] * basis[i + 1]
    if any(c.denominator != 1 for c in poly):  # pragma: no cover
        raise InternalAssertion("interpolated resultant is not integral")
    return IntPoly([int(c) for c in poly]).primitive()


def _ratrecon(u: int, M: int):
    bound = math.isqrt(M // 2)
    r0, r1 = M, u % M
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(r1, abs(t1)) != 1:
        return None
    return (r1, t1) if t1 > 0 else (-r1, -t1)


def _reconstruct(residues: list, M: int):
    """Primitive integer vector proportional to the rationals behind residues."""
    delta = 1
    nums: list = []
    half = M // 2
    limit_bits = M.bit_length() - _LIFT_MARGIN_BITS
    for u in residues:
        v = u * delta % M
        s = v if v <= half else v - M
        if s and abs(s).bit_length() > limit_bits:
            rr = _ratrecon(v, M)
            if rr is None:
                return None
            a, b = rr
            delta *= b
            nums = [x * b for x in nums]
            s = a
        nums.append(s)
    return IntPoly(nums).primitive()


def _mod_array(c, p: int) -> np.ndarray:
    return np.array([x % p for x in c], dtype=np.int64)


def sigma_modular(E: IntPoly, A: IntPoly, B: IntPoly, max_primes: int = 20000) -> IntPoly:
    """Multi-modular sigma; accepted once the reconstruction is unchanged for
    two further primes."""
    D = E.degree()
    residues = [0] * (D + 1)
    M = 1
    prev = None
    stable = 0
    used = 0
    for p in descending_primes():
        if E.lc() % p == 0:
            continue
        used += 1
        if used > max_primes:
            raise BudgetExceeded("budget exceeded: multi-modular sigma did not stabilize")
        inv_lc = pow(E.lc(), -1, p)
        m = _mod_array([x * inv_lc for x in E.c], p)
        a = kernels.poly_rem_mod(_mod_array(A.c, p), m, p)
        b = kernels.poly_rem_mod(_mod_array(B.c, p), m, p)
        ok, binv = kernels.poly_invmod(b, m, p)
        if not ok:
            continue
        r = kernels.poly_mulmod(a, binv, m, p)
        cp = kernels.charpoly_mult_mod(m, r, p)
        inv_M = pow(M % p, -1, p)
        for i in range(D + 1):
            t = (int(cp[i]) - residues[i]) * inv_M % p
            residues[i] += M * t
        M *= p
        cand = _reconstruct(residues, M)
        if cand is not None and cand == prev:
            stable += 1
            if stable >= _STABLE_PRIMES:
                return cand
        else:
            stable = 0
        prev = cand
    raise BudgetExceeded("budget exceeded: ran out of word-size primes")  # pragma: no cover


# -- Galois classes ---------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraicClass:
    """One Galois orbit of multipliers.

    multiplicity is the exponent of minpoly in sigma, i.e. the number of
    periodic points (not cycles) carrying each conjugate.
    """

    minpoly: IntPoly
    period: int
    multiplicity: int
    exact_period: bool = True

    def is_superattracting(self) -> bool:
        return self.minpoly == IntPoly.x()

    def degree(self) -> int:
        return self.minpoly.degree()

    def to_json(self) -> dict:
        return {
            "minpoly": [str(c) for c in self.minpoly.c],
            "period": self.period,
            "multiplicity": self.multiplicity,
            "exact_period": self.exact_period,
        }


@lru_cache(maxsize=128)
def _classes(f, n, exact_only):
    sigma = multiplier_polynomial(f, n, exact_only)
    if sigma.degree() < 1:
        return ()
    fac = factor_over_Z(sigma)
    return tuple(AlgebraicClass(g, n, e, exact_only) for g, e in fac.factors)


def galois_classes(f: RationalMap, n: int, exact_only: bool = True) -> list:
    return list(_classes(f, n, bool(exact_only)))


# -- length spectrum ---------------------------------------------------------------------

@dataclass
class LengthSpectrum:
    period: int
    L: list  # all lengths |rho| over Fix(f^n), ascending, with multiplicity
    RL: list  # lengths > 1 + guard
    boundary: list  # lengths within the guard band around 1
    guard: float
    precision: int = 53

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "L": self.L,
            "RL": self.RL,
            "boundary": self.boundary,
            "guard": self.guard,
        }


def class_lengths(cls: AlgebraicClass, precision: int = 53) -> list:
    """|rho| for each conjugate of the class, each repeated by its multiplicity."""
    if cls.is_superattracting():
        return [0.0] * cls.multiplicity
    if cls.minpoly.degree() == 1:
        a0, a1 = cls.minpoly.c
        return [abs(a0 / a1)] * cls.multiplicity
    rs = complex_roots(cls.minpoly, precision=precision)
    out = []
    for r in rs.roots:
        out.extend([abs(r)] * cls.multiplicity)
    return out


def length_spectrum(f: RationalMap, n: int, precision: int = 53) -> LengthSpectrum:
    """L_n over all d^n + 1 fixed points of f^n and its repelling part RL_n."""
    lengths = []
    for cls in galois_classes(f, n, exact_only=False):
        lengths.extend(class_lengths(cls, precision))
    if len(lengths) != f.degree ** n + 1:
        raise InternalAssertion(
            f"length multiset has {len(lengths)} entries, expected {f.degree ** n + 1}"
        )
    lengths.sort()
    guard = 2.0 ** (-precision / 2)
    rl = [x for x in lengths if x > 1 + guard]
    boundary = [x for x in lengths if abs(x - 1) <= guard]
    return LengthSpectrum(n, lengths, rl, boundary, guard, precision)


def rl_star(f: RationalMap, m: int, max_m: int = RL_STAR_MAX_M, precision: int = 53) -> list:
    """RL*_m = RL_{m!}."""
    if m < 1:
        raise InvalidInput("index m must be >= 1")
    if m > max_m:
        raise BudgetExceeded(f"budget exceeded: RL* index {m} above {max_m} ({math.factorial(m)} periods)")
    return length_spectrum(f, math.factorial(m), precision).RL


@dataclass
class SpectrumTable:
    classes: dict = field(default_factory=dict)  # n -> [AlgebraicClass] (exact period)
    lengths: dict = field(default_factory=dict)  # n -> LengthSpectrum
    rl_star: dict = field(default_factory=dict)  # m -> RL_{m!}

    def class_count_check(self, d: int) -> bool:
        """sum over m | n of sum deg * multiplicity == d^n + 1 for every stored n."""
        for n in self.classes:
            if not all(m in self.classes for m in range(1, n + 1) if n % m == 0):
                continue
            total = sum(c.degree() * c.multiplicity
                        for m in self.classes if n % m == 0 for c in self.classes[m])
            if total != d ** n + 1:
                return False
        return True


def spectrum_table(f: RationalMap, nmax: int, precision: int = 53) -> SpectrumTable:
    table = SpectrumTable()
    for n in range(1, nmax + 1):
        table.classes[n] = galois_classes(f, n)
        table.lengths[n] = length_spectrum(f, n, precision)
    m = 1
    while m <= RL_STAR_MAX_M and math.factorial(m) <= nmax:
        table.rl_star[m] = table.lengths[math.factorial(m)].RL
        m += 1
    return table
