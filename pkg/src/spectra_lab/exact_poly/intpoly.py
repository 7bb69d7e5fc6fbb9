"""Dense univariate polynomials over Z and Q with Python big integers.

Coefficients are stored in ascending degree order. The zero polynomial is
the empty tuple and has degree -1.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from ..errors import InvalidInput

# Above this many output coefficients, multiplication goes through
# Kronecker substitution (one big-integer product) instead of schoolbook.
_KRONECKER_CUTOFF = 48


class NotDivisible(ArithmeticError):
    pass


def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


class IntPoly:
    """Polynomial with integer coefficients, ascending order."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[int] = ()):
        self.c = tuple(_trim([int(x) for x in coeffs]))

    @classmethod
    def _raw(cls, c: Sequence[int]) -> "IntPoly":
        # caller guarantees ints and no trailing zeros
        p = cls.__new__(cls)
        p.c = tuple(c)
        return p

    @classmethod
    def x(cls) -> "IntPoly":
        return cls._raw((0, 1))

    @classmethod
    def const(cls, a: int) -> "IntPoly":
        return cls((a,))

    # -- basic accessors ---------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        return self.c

    def degree(self) -> int:
        return len(self.c) - 1

    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def __len__(self) -> int:
        return len(self.c)

    def __getitem__(self, i: int) -> int:
        return self.c[i] if 0 <= i < len(self.c) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPoly):
            return self.c == other.c
        if isinstance(other, int):
            return self.c == (tuple([other]) if other else ())
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("IntPoly", self.c))

    def __repr__(self) -> str:
        return f"IntPoly({list(self.c)})"

    def to_str(self, var: str = "x") -> str:
        if not self.c:
            return "0"
        parts = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if not a:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            mag = abs(a)
            body = str(mag) if (mag != 1 or not mono) else ""
            if body and mono:
                body += "*"
            sign = "-" if a < 0 else "+"
            parts.append((sign, body + mono))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            s += f" {sign} {term}"
        return s

    # -- arithmetic ------------------------------------------------------------
    def __neg__(self) -> "IntPoly":
        return IntPoly._raw([-a for a in self.c])

    def __add__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return IntPoly._raw(_trim(out))

    __radd__ = __add__

    def __sub__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "IntPoly":
        return (-self) + other

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            if not other:
                return IntPoly()
            return IntPoly._raw([a * other for a in self.c])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly._raw(mul_lists(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPoly":
        if e < 0:
            raise ValueError("negative power")
        result = IntPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, int) else 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly._raw([i * a for i, a in enumerate(self.c)][1:])

    def compose(self, g: "IntPoly") -> "IntPoly":
        acc = IntPoly()
        for a in reversed(self.c):
            acc = acc * g + a
        return acc

    def content(self) -> int:
        g = 0
        for a in self.c:
            g = gcd(g, a)
            if g == 1:
                break
        return g

    def primitive(self) -> "IntPoly":
        """Content 1 and positive leading coefficient (zero stays zero)."""
        if not self.c:
            return self
        g = self.content()
        if self.c[-1] < 0:
            g = -g
        if g == 1:
            return self
        return IntPoly._raw([a // g for a in self.c])

    def is_primitive(self) -> bool:
        return bool(self.c) and self.c[-1] > 0 and self.content() == 1

    def is_monic(self) -> bool:
        return bool(self.c) and self.c[-1] == 1

    def scale_var(self, s: int) -> "IntPoly":
        """p(s*x)."""
        out, k = [], 1
        for a in self.c:
            out.append(a * k)
            k *= s
        return IntPoly(out)

    def reverse(self, n: int | None = None) -> "IntPoly":
        """x^n p(1/x) with n defaulting to the degree."""
        n = self.degree() if n is None else n
        c = list(self.c) + [0] * (n + 1 - len(self.c))
        return IntPoly(c[::-1])

    def max_bits(self) -> int:
        return max((abs(a).bit_length() for a in self.c), default=0)

    def byte_size(self) -> int:
        return sum((abs(a).bit_length() + 8) // 8 for a in self.c)


class RatPoly:
    """Polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        self.c = tuple(_trim([Fraction(x) for x in coeffs]))

    def degree(self) -> int:
        return len(self.c) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self.c == other.c

    def __hash__(self) -> int:
        return hash(("RatPoly", self.c))

    def __repr__(self) -> str:
        return f"RatPoly({[str(a) for a in self.c]})"

    def __call__(self, x):
        acc = Fraction(0)
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def denominator_lcm(self) -> int:
        m = 1
        for a in self.c:
            m = m * a.denominator // gcd(m, a.denominator)
        return m

    def clear_denominators(self) -> tuple[int, IntPoly]:
        """Return (m, m*self) with m the lcm of the denominators."""
        m = self.denominator_lcm()
        return m, IntPoly([int(a * m) for a in self.c])

    @classmethod
    def from_intpoly(cls, p: IntPoly) -> "RatPoly":
        return cls(p.c)


def mul_lists(a: Sequence[int], b: Sequence[int]) -> list:
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if min(la, lb) == 1:
        s = a[0] if la == 1 else b[0]
        other = b if la == 1 else a
        return [s * v for v in other]
    if la + lb > _KRONECKER_CUTOFF:
        return _kronecker_mul(a, b)
    out = [0] * (la + lb - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list:
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    bound = ma * mb * min(len(a), len(b))
    k = bound.bit_length() + 2
    A = _pack(a, k)
    B = _pack(b, k)
    return _unpack(A * B, k, len(a) + len(b) - 1)


def _pack(c: Sequence[int], k: int) -> int:
    acc = 0
    for v in reversed(c):
        acc = (acc << k) + v
    return acc


def _unpack(v: int, k: int, n: int) -> list:
    # signed base-2^k digits; divide and conquer keeps the shifts cheap
    if n <= 64:
        out = []
        half = 1 << (k - 1)
        full = 1 << k
        mask = full - 1
        for _ in range(n):
            r = v & mask
            if r >= half:
                r -= full
            out.append(r)
            v = (v - r) >> k
        return _trim(out)
    m = n // 2
    low_bits = m * k
    low = v & ((1 << low_bits) - 1)
    # low part as a signed number: its top digit decides the borrow
    if low >> (low_bits - 1):
        low -= 1 << low_bits
    high = (v - low) >> low_bits
    lo = _unpack(low, k, m)
    lo += [0] * (m - len(lo))
    return _trim(lo + _unpack(high, k, n - m))


# -- division ------------------------------------------------------------------

def exact_quotient(a: IntPoly, b: IntPoly) -> IntPoly:
    """a / b over Z; raises NotDivisible unless the division is exact."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return IntPoly()
    r = list(a.c)
    db = b.degree()
    lb = b.c[-1]
    bc = b.c
    dq = len(r) - 1 - db
    if dq < 0:
        raise NotDivisible("degree of divisor exceeds dividend")
    q = [0] * (dq + 1)
    for i in range(dq, -1, -1):
        top = r[i + db]
        if top:
            qi, rem = divmod(top, lb)
            if rem:
                raise NotDivisible("non-integral quotient coefficient")
            q[i] = qi
            for j in range(db + 1):
                r[i + j] -= qi * bc[j]
    if any(r[:db]):
        raise NotDivisible("nonzero remainder")
    return IntPoly._raw(_trim(q))


def divides(b: IntPoly, a: IntPoly) -> bool:
    try:
        exact_quotient(a, b)
    except NotDivisible:
        return False
    return True


def pseudo_remainder(a: IntPoly, b: IntPoly) -> IntPoly:
    """lc(b)^(deg a - deg b + 1) * a mod b."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    da, db = a.degree(), b.degree()
    if da < db:
        return a
    r = list(a.c)
    lb = b.c[-1]
    bc = b.c
    e = da - db + 1
    for i in range(da - db, -1, -1):
        top = r[i + db]
        # r <- lb*r - top*x^i*b
        for j in range(len(r)):
            r[j] *= lb
        if top:
            for j in range(db + 1):
                r[i + j] -= top * bc[j]
        e -= 1
    r = r[:db]
    return IntPoly._raw(_trim(r))


def divmod_rational(a: IntPoly, b: IntPoly) -> tuple[RatPoly, RatPoly]:
    """Division with remainder over Q."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    r = [Fraction(x) for x in a.c]
    db = b.degree()
    lb = Fraction(b.c[-1])
    dq = len(r) - 1 - db
    if dq < 0:
        return RatPoly(), RatPoly(r)
    q = [Fraction(0)] * (dq + 1)
    for i in range(dq, -1, -1):
        t = r[i + db] / lb
        q[i] = t
        if t:
            for j in range(db + 1):
                r[i + j] -= t * b.c[j]
    return RatPoly(q), RatPoly(r[:db])


# -- gcd, resultant, squarefree ----------------------------------------------

def subresultant_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd of a and b via the subresultant remainder sequence.

    A heuristic gcd (evaluation at a large integer, verified by exact
    division) is tried first; the remainder sequence is the fallback and
    decides every case the heuristic cannot certify.
    """
    if not a and not b:
        raise InvalidInput("gcd of two zero polynomials")
    if not b:
        return a.primitive()
    if not a:
        return b.primitive()
    a, b = a.primitive(), b.primitive()
    if a.degree() == 0 or b.degree() == 0:
        return IntPoly.const(1)
    if a == b:
        return a
    g = _heuristic_gcd(a, b)
    if g is not None:
        return g
    return _prs_gcd(a, b)


def _prs_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    if a.degree() < b.degree():
        a, b = b, a
    g = h = 1
    while True:
        delta = a.degree() - b.degree()
        r = pseudo_remainder(a, b)
        if not r:
            return b.primitive()
        if r.degree() == 0:
            return IntPoly.const(1)
        a = b
        div = g * h ** delta
        b = IntPoly._raw([x // div for x in r.c])
        g = a.lc()
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = g ** delta // h ** (delta - 1)


def _heuristic_gcd(a: IntPoly, b: IntPoly, attempts: int = 6):
    ma = max(abs(x) for x in a.c)
    mb = max(abs(x) for x in b.c)
    xi = 2 * min(ma, mb) + 29
    for _ in range(attempts):
        ga = _eval_int(a, xi)
        gb = _eval_int(b, xi)
        gv = gcd(ga, gb)
        cand = IntPoly(_balanced_digits(gv, xi)).primitive()
        # xi > 2*min(norm) + 1: a candidate dividing both is the gcd
        if cand and divides(cand, a) and divides(cand, b):
            return cand
        xi = (xi * 73794) // 27011 + 1
    return None


def _eval_int(p: IntPoly, x: int) -> int:
    acc = 0
    for a in reversed(p.c):
        acc = acc * x + a
    return acc


def _balanced_digits(v: int, base: int) -> list:
    out = []
    half = base // 2
    while v:
        r = v % base
        if r > half:
            r -= base
        out.append(r)
        v = (v - r) // base
    return out


def resultant(a: IntPoly, b: IntPoly) -> int:
    """Res(a, b) = lc(b)^deg(a) * prod a(beta) over the roots beta of b.

    This equals the determinant of the Sylvester matrix with the rows of b
    placed first, so Res(x - u, x - v) = v - u. It differs from the
    a-rows-first convention by (-1)^(deg a * deg b).
    """
    if not a or not b:
        raise InvalidInput("resultant of a zero polynomial")
    m, n = a.degree(), b.degree()
    r = _resultant_std(a, b)
    return -r if (m * n) & 1 else r


def _resultant_std(A: IntPoly, B: IntPoly) -> int:
    # lc(A)^deg B * prod B(alpha); subresultant algorithm with content removal
    if A.degree() == 0:
        return A.c[0] ** B.degree()
    if B.degree() == 0:
        return B.c[0] ** A.degree()
    ca, cb = A.content(), B.content()
    t = ca ** B.degree() * cb ** A.degree()
    A = IntPoly._raw([x // ca for x in A.c])
    B = IntPoly._raw([x // cb for x in B.c])
    s = 1
    if A.degree() < B.degree():
        A, B = B, A
        if A.degree() & 1 and B.degree() & 1:
            s = -s
    g = h = 1
    while B.degree() > 0:
        delta = A.degree() - B.degree()
        if A.degree() & 1 and B.degree() & 1:
            s = -s
        R = pseudo_remainder(A, B)
        A = B
        if not R:
            return 0
        div = g * h ** delta
        B = IntPoly._raw([x // div for x in R.c])
        g = A.lc()
        if delta == 1:
            h = g
        elif delta > 1:
            h = g ** delta // h ** (delta - 1)
    dA = A.degree()
    lb = B.c[0]
    if dA == 0:
        hh = 1
    elif dA == 1:
        hh = lb
    else:
        hh = lb ** dA // h ** (dA - 1)
    return s * t * hh


def squarefree_decomposition(a: IntPoly) -> list:
    """Yun's algorithm over Z.

    Returns [(part, e), ...] with primitive pairwise coprime squarefree
    parts ordered by exponent; content(a) * sign * prod part^e == a.
    Constant parts are omitted.
    """
    if not a:
        raise InvalidInput("squarefree decomposition of zero")
    f = a.primitive()
    if f.degree() <= 0:
        return []
    df = f.derivative()
    c = subresultant_gcd(f, df)
    if c.degree() == 0:
        return [(f, 1)]
    w = exact_quotient(f, c)
    y = exact_quotient(df, c)
    out = []
    i = 1
    while w.degree() > 0:
        z = y - w.derivative()
        if not z:
            out.append((w.primitive(), i))
            break
        g = subresultant_gcd(w, z)
        if g.degree() > 0:
            out.append((g, i))
        w = exact_quotient(w, g)
        y = exact_quotient(z, g)
        i += 1
    return [(p.primitive(), e) for p, e in out]


def squarefree_part(a: IntPoly) -> IntPoly:
    out = IntPoly.const(1)
    for p, _ in squarefree_decomposition(a):
        out = out * p
    return out


def poly_from_roots(roots: Sequence[int]) -> IntPoly:
    p = IntPoly.const(1)
    for r in roots:
        p = p * IntPoly((-r, 1))
    return p


def sylvester_determinant(a: IntPoly, b: IntPoly) -> int:
    """det of the Sylvester matrix with b's rows first (Bareiss elimination).

    Independent O(n^3) route used to cross-check :func:`resultant`.
    """
    m, n = a.degree(), b.degree()
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(m):
        row = [0] * size
        for j, v in enumerate(reversed(b.c)):
            row[i + j] = v
        rows.append(row)
    for i in range(n):
        row = [0] * size
        for j, v in enumerate(reversed(a.c)):
            row[i + j] = v
        rows.append(row)
    return bareiss_det(rows)


def bareiss_det(M: list) -> int:
    M = [list(r) for r in M]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        piv = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * piv - M[i][k] * M[k][j]) // prev
        prev = piv
    return sign * M[n - 1][n - 1]
