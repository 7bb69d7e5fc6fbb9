"""Exact degree-d self-maps of P^1 over Q.

A map is stored affinely as f = P/Q with integer P, Q; the homogeneous
pair (X, Y) -> (Y^d P(X/Y), Y^d Q(X/Y)) is always of degree d = max(deg P,
deg Q), which is how infinity is handled without special cases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .config import coefficient_budget_bytes
from .errors import BadReduction, BudgetExceeded, DegeneratePair, DegreeTooSmall, InvalidInput
from .exact_poly import IntPoly, exact_quotient, resultant, subresultant_gcd


class _Infinity:
    """The point at infinity of P^1 (singleton)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidInput("booleans are not coefficients")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse rational {x!r}") from exc
    if isinstance(x, float):
        # exact binary value; the CLI never produces floats
        return Fraction(x)
    raise InvalidInput(f"unsupported coefficient type {type(x).__name__}")


def _clear(coeffs: Sequence[Fraction], den: int) -> IntPoly:
    return IntPoly([int(c * den) for c in coeffs])


# -- binary forms ------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous integer form sum c_i X^i Y^(D-i).

    Normalized forms are primitive with the leading coefficient of the affine
    part positive. The multiplicity of infinity is D minus the affine degree.
    """

    coeffs: tuple
    degree: int
    flags: tuple = field(default=(), compare=False)

    @classmethod
    def from_affine(cls, a: IntPoly, D: int, normalize: bool = True,
                    flags: tuple = ()) -> "BinaryForm":
        if not a:
            raise InvalidInput("the zero form has no roots to speak of")
        if a.degree() > D:
            raise InvalidInput("affine degree exceeds form degree")
        if normalize:
            a = a.primitive()
        return cls(tuple(a.c) + (0,) * (D - a.degree()), D, tuple(flags))

    def affine(self) -> IntPoly:
        return IntPoly(self.coeffs)

    def infinity_multiplicity(self) -> int:
        return self.degree - self.affine().degree()

    def evaluate(self, x, y):
        acc = 0
        for i, c in enumerate(self.coeffs):
            if c:
                acc += c * x ** i * y ** (self.degree - i)
        return acc

    def to_json(self) -> dict:
        out = {"degree": self.degree, "coeffs": [str(c) for c in self.coeffs]}
        if self.flags:
            out["flags"] = list(self.flags)
        return out


# -- Mobius transformations ---------------------------------------------------------

@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d)."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _to_fraction(getattr(self, name)))
        if self.a * self.d - self.b * self.c == 0:
            raise InvalidInput("Mobius map is not invertible (ad - bc = 0)")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    def __call__(self, z):
        if z is INFINITY:
            return INFINITY if self.c == 0 else self.a / self.c
        z = _to_fraction(z)
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        return (self.a * z + self.b) / den

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def integral(self) -> tuple:
        """Integer entries of a scalar multiple (projective representative)."""
        den = lcm(*(v.denominator for v in (self.a, self.b, self.c, self.d)))
        ints = [int(v * den) for v in (self.a, self.b, self.c, self.d)]
        g = reduce(gcd, ints)
        return tuple(v // g for v in ints)


# -- rational maps ----------------------------------------------------------------------

class RationalMap:
    """f = num/den with coprime, jointly primitive integer polynomials, degree >= 2."""

    __slots__ = ("num", "den", "degree")

    def __init__(self, num: IntPoly, den: IntPoly, degree: int):
        self.num = num
        self.den = den
        self.degree = degree

    # construction ---------------------------------------------------------------
    @classmethod
    def from_intpolys(cls, P: IntPoly, Q: IntPoly, check_budget: bool = True,
                      coprime: bool = False) -> "RationalMap":
        """Normalize P/Q. coprime=True skips the gcd for pairs known coprime
        (iterates and conjugates of normalized maps)."""
        if not Q:
            raise DegeneratePair("degenerate pair: denominator is zero")
        if not P:
            raise DegreeTooSmall("degree too small: the map is constant 0")
        if not coprime:
            g = subresultant_gcd(P, Q)
            if g.degree() > 0:
                P, Q = exact_quotient(P, g), exact_quotient(Q, g)
        content = gcd(P.content(), Q.content())
        if content != 1:
            P = IntPoly([a // content for a in P.c])
            Q = IntPoly([a // content for a in Q.c])
        d = max(P.degree(), Q.degree())
        lead = P if P.degree() >= Q.degree() else Q
        if lead.lc() < 0:
            P, Q = -P, -Q
        if d < 2:
            raise DegreeTooSmall(f"degree too small: reduced map has degree {d}")
        # coprime affine parts with d = max degree cannot share a root at
        # infinity either, so the homogeneous resultant is nonzero here
        f = cls(P, Q, d)
        if check_budget:
            _check_budget(f)
        return f

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMap) and (self.num, self.den) == (other.num, other.den)

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalMap(({self.num.to_str('z')}) / ({self.den.to_str('z')}))"

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def hom_coeffs(self) -> tuple:
        """Coefficient lists (length d+1) of X^i Y^(d-i) in P and Q."""
        d = self.degree
        P = list(self.num.c) + [0] * (d + 1 - len(self.num.c))
        Q = list(self.den.c) + [0] * (d + 1 - len(self.den.c))
        return P, Q

    # evaluation ------------------------------------------------------------------
    def apply_projective(self, x, y):
        """(P(x, y), Q(x, y)) for elements of any commutative ring."""
        Pc, Qc = self.hom_coeffs()
        d = self.degree
        xs = [1]
        for _ in range(d):
            xs.append(xs[-1] * x)
        ys = [1]
        for _ in range(d):
            ys.append(ys[-1] * y)
        pv = qv = 0 * x
        for i in range(d + 1):
            mono = xs[i] * ys[d - i]
            if Pc[i]:
                pv = pv + Pc[i] * mono
            if Qc[i]:
                qv = qv + Qc[i] * mono
        return pv, qv

    def __call__(self, z):
        if z is INFINITY:
            x, y = Fraction(1), Fraction(0)
        else:
            x, y = _to_fraction(z), Fraction(1)
        pv, qv = self.apply_projective(x, y)
        if qv == 0:
            return INFINITY
        return pv / qv

    def to_json(self) -> dict:
        return {"num": [str(a) for a in self.num.c], "den": [str(a) for a in self.den.c]}


def parse_normalize(num_coeffs: Sequence, den_coeffs: Sequence) -> RationalMap:
    """Build a normalized RationalMap from rational coefficient lists (ascending).

    Order of normalization: clear denominators, cancel the polynomial gcd and
    the joint content, fix the sign, then check the degree and resultant.
    """
    num = [_to_fraction(c) for c in num_coeffs]
    den = [_to_fraction(c) for c in den_coeffs]
    if not any(num) and not any(den):
        raise InvalidInput("numerator and denominator are both zero")
    common = lcm(*(c.denominator for c in num + den)) if num + den else 1
    return RationalMap.from_intpolys(_clear(num, common), _clear(den, common))


def _check_budget(f: RationalMap) -> None:
    limit = coefficient_budget_bytes()
    for poly in (f.num, f.den):
        if poly.byte_size() > limit:
            raise BudgetExceeded(
                f"budget exceeded: {poly.byte_size()} coefficient bytes above {limit}"
            )


def homogeneous_forms_iterate(f: RationalMap, n: int) -> tuple:
    """Homogeneous pair of f^n as affine IntPolys, without normalization.

    Both entries are dehomogenized at Y = 1, so max degree = d^n.
    """
    if n < 1:
        raise InvalidInput("iterate count must be >= 1")
    Pc, Qc = f.hom_coeffs()
    d = f.degree
    X, Y = IntPoly.x(), IntPoly.const(1)
    limit = coefficient_budget_bytes()
    for _ in range(n):
        xp = [IntPoly.const(1)]
        yp = [IntPoly.const(1)]
        for _ in range(d):
            xp.append(xp[-1] * X)
            yp.append(yp[-1] * Y)
        nx = ny = IntPoly()
        for i in range(d + 1):
            mono = xp[i] * yp[d - i]
            if Pc[i]:
                nx = nx + mono * Pc[i]
            if Qc[i]:
                ny = ny + mono * Qc[i]
        g = gcd(nx.content(), ny.content())
        if g > 1:
            nx = IntPoly([a // g for a in nx.c])
            ny = IntPoly([a // g for a in ny.c])
        X, Y = nx, ny
        if X.byte_size() > limit or Y.byte_size() > limit:
            raise BudgetExceeded(
                f"budget exceeded: iterate coefficients above {limit} bytes"
            )
    return X, Y


def iterate(f: RationalMap, n: int) -> RationalMap:
    """f^n, exactly. Degree d^n."""
    if n == 1:
        return f
    X, Y = homogeneous_forms_iterate(f, n)
    out = RationalMap.from_intpolys(X, Y, coprime=True)
    assert out.degree == f.degree ** n
    return out


def derivative_parts(f: RationalMap) -> tuple:
    """(W, Q^2) with f' = W / Q^2 and W = P'Q - PQ'."""
    P, Q = f.num, f.den
    return P.derivative() * Q - P * Q.derivative(), Q * Q


def conjugate(f: RationalMap, m: Mobius) -> RationalMap:
    """m o f o m^-1, normalized."""
    a, b, c, dd = m.integral()
    # m^-1 (up to scalar) is (d z - b) / (-c z + a)
    u = IntPoly([-b, dd])
    v = IntPoly([a, -c])
    Pc, Qc = f.hom_coeffs()
    deg = f.degree
    up = [IntPoly.const(1)]
    vp = [IntPoly.const(1)]
    for _ in range(deg):
        up.append(up[-1] * u)
        vp.append(vp[-1] * v)
    P1 = Q1 = IntPoly()
    for i in range(deg + 1):
        mono = up[i] * vp[deg - i]
        if Pc[i]:
            P1 = P1 + mono * Pc[i]
        if Qc[i]:
            Q1 = Q1 + mono * Qc[i]
    return RationalMap.from_intpolys(P1 * a + Q1 * b, P1 * c + Q1 * dd, coprime=True)


def critical_form(f: RationalMap) -> BinaryForm:
    """Homogenized W = P'Q - PQ' of degree 2d - 2 (infinity included)."""
    W, _ = derivative_parts(f)
    return BinaryForm.from_affine(W, 2 * f.degree - 2)


def homogeneous_resultant(f: RationalMap) -> int:
    """|Res| of the degree-d homogenizations of P and Q.

    Computed as lc^(d - deg) times the affine resultant; only the absolute
    value is returned since good reduction only asks about divisibility.
    """
    P, Q, d = f.num, f.den, f.degree
    r = abs(resultant(P, Q))
    if P.degree() < d:
        r *= abs(Q.lc()) ** (d - P.degree())
    elif Q.degree() < d:
        r *= abs(P.lc()) ** (d - Q.degree())
    return r


def good_reduction(f: RationalMap, p: int) -> bool:
    return homogeneous_resultant(f) % p != 0


def reduction_obstruction(f: RationalMap, p: int) -> str | None:
    """Why f has bad reduction at p (None if it is good)."""
    Pc, Qc = f.hom_coeffs()
    if all(c % p == 0 for c in Qc):
        return f"denominator vanishes identically mod {p}"
    if all(c % p == 0 for c in Pc):
        return f"numerator vanishes identically mod {p}"
    if Pc[-1] % p == 0 and Qc[-1] % p == 0:
        return f"degree drop mod {p}: both degree-{f.degree} coefficients vanish"
    if not good_reduction(f, p):
        return f"homogeneous resultant divisible by {p}"
    return None


def require_good_reduction(f: RationalMap, p: int) -> None:
    why = reduction_obstruction(f, p)
    if why is not None:
        raise BadReduction(f"bad reduction at {p}: {why}")


@dataclass(frozen=True)
class CriticalClass:
    """A Galois orbit of critical points: the roots of minpoly, or infinity."""

    crit_id: int
    minpoly: IntPoly | None  # None stands for the point at infinity
    multiplicity: int

    @property
    def is_infinity(self) -> bool:
        return self.minpoly is None

    def degree(self) -> int:
        return 1 if self.minpoly is None else self.minpoly.degree()

    def to_json(self) -> dict:
        return {
            "crit_id": self.crit_id,
            "minpoly": None if self.minpoly is None else [str(c) for c in self.minpoly.c],
            "multiplicity": self.multiplicity,
        }


def critical_classes(f: RationalMap) -> list:
    """Irreducible factors of the critical form in factorization order, infinity last."""
    from .exact_poly import factor_over_Z

    form = critical_form(f)
    out = []
    for g, e in factor_over_Z(form.affine()).factors:
        out.append(CriticalClass(len(out), g, e))
    if form.infinity_multiplicity():
        out.append(CriticalClass(len(out), None, form.infinity_multiplicity()))
    return out
