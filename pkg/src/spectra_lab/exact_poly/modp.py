"""Polynomials over F_p, factorization mod p, and the fields F_{p^k}.

Polynomials over F_p are plain lists of ints in [0, p), ascending, without
trailing zeros. Randomness for equal-degree splitting comes from a
counter-based hash stream keyed on (p, polynomial), so factor orderings and
split choices are identical across runs and processes.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from ..errors import InvalidInput
from .intpoly import IntPoly


class BadLeadingReduction(InvalidInput):
    pass


# -- list arithmetic mod p -------------------------------------------------------

def trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def reduce(a: Sequence[int], p: int) -> list:
    return trim([x % p for x in a])


def add(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    return trim(out)


def sub(a, b, p):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % p
    return trim(out)


def scale(a, s, p):
    s %= p
    if not s:
        return []
    return [x * s % p for x in a]


def mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([v % p for v in out])


def divmod_p(a, b, p):
    if not b:
        raise ZeroDivisionError("division by zero polynomial mod p")
    r = list(a)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], trim(r)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        t = r[i + db] * inv % p
        q[i] = t
        if t:
            for j in range(db + 1):
                r[i + j] = (r[i + j] - t * b[j]) % p
    return trim(q), trim(r[:db])


def rem(a, b, p):
    return divmod_p(a, b, p)[1]


def monic(a, p):
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def gcd(a, b, p):
    while b:
        a, b = b, rem(a, b, p)
    return monic(a, p)


def xgcd(a, b, p):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = divmod_p(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    if not r0:
        return [], s0, t0
    inv = pow(r0[-1], -1, p)
    return scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)


def powmod(base, e, m, p):
    result = [1]
    base = rem(base, m, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), m, p)
        e >>= 1
        if e:
            base = rem(mul(base, base, p), m, p)
    return result


def derivative(a, p):
    return trim([i * x % p for i, x in enumerate(a)][1:])


def evaluate(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


# -- deterministic stream -----------------------------------------------------------

def _stream(key: str, p: int) -> Iterator[int]:
    counter = 0
    nbytes = (p.bit_length() + 71) // 8
    while True:
        h = hashlib.blake2b(f"{key}|{counter}".encode(), digest_size=min(64, nbytes))
        yield int.from_bytes(h.digest(), "little") % p
        counter += 1


# -- factorization mod p -----------------------------------------------------------

def _pth_root(a, p):
    # a(x) = b(x^p) over F_p; coefficients are their own p-th roots
    return [a[i] for i in range(0, len(a), p)]


def squarefree_mod_p(a, p):
    """Monic a -> [(squarefree monic part, multiplicity)], Musser style."""
    out = []
    _sqf_rec(monic(a, p), p, 1, out)
    merged = {}
    for f, e in out:
        if len(f) > 1:
            merged.setdefault(e, [1])
            merged[e] = mul(merged[e], f, p)
    return [(f, e) for e, f in sorted(merged.items())]


def _sqf_rec(a, p, mult, out):
    if len(a) <= 1:
        return
    da = derivative(a, p)
    if not da:
        _sqf_rec(_pth_root(a, p), p, mult * p, out)
        return
    c = gcd(a, da, p)
    w = divmod_p(a, c, p)[0]
    i = 1
    while len(w) > 1:
        y = gcd(w, c, p)
        fac = divmod_p(w, y, p)[0]
        if len(fac) > 1:
            out.append((fac, i * mult))
        w = y
        c = divmod_p(c, y, p)[0]
        i += 1
    if len(c) > 1:
        _sqf_rec(_pth_root(c, p), p, mult * p, out)


def distinct_degree(a, p):
    """Squarefree monic a -> [(product of irreducibles of degree d, d)]."""
    out = []
    f = list(a)
    h = [0, 1]
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f, p)
        g = gcd(f, sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            f = divmod_p(f, g, p)[0]
            h = rem(h, f, p)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def equal_degree(a, d, p, stream):
    """Split a product of distinct irreducibles of degree d (Cantor-Zassenhaus)."""
    n = len(a) - 1
    if n == d:
        return [a]
    while True:
        r = trim([next(stream) for _ in range(n)])
        if len(r) <= 1:
            continue
        if p == 2:
            t = list(r)
            cur = list(r)
            for _ in range(d - 1):
                cur = rem(mul(cur, cur, p), a, p)
                t = add(t, cur, p)
            g = gcd(a, t, p)
        else:
            e = (p ** d - 1) // 2
            g = gcd(a, sub(powmod(r, e, a, p), [1], p), p)
        if 1 < len(g) < len(a):
            h = divmod_p(a, g, p)[0]
            return equal_degree(g, d, p, stream) + equal_degree(h, d, p, stream)


def _sort_key(item):
    f, e = item
    return (len(f), list(f), e)


def factor_mod_p(a: IntPoly, p: int) -> list:
    """Monic irreducible factors of a mod p with multiplicities.

    Raises BadLeadingReduction when p divides the leading coefficient.
    The product of the returned factors equals a mod p up to lc(a).
    """
    if not a:
        raise InvalidInput("factor_mod_p of the zero polynomial")
    if a.lc() % p == 0:
        raise BadLeadingReduction(f"bad leading reduction: {p} divides the leading coefficient")
    f = monic(reduce(a.c, p), p)
    return factor_list_mod_p(f, p)


def factor_list_mod_p(f: list, p: int) -> list:
    if len(f) <= 1:
        return []
    stream = _stream(f"{p}:{f}", p)
    out = []
    for part, e in squarefree_mod_p(f, p):
        for g, d in distinct_degree(part, p):
            for h in equal_degree(g, d, p, stream):
                out.append((h, e))
    out.sort(key=_sort_key)
    return out


def is_irreducible_mod_p(f: list, p: int) -> bool:
    fac = factor_list_mod_p(monic(f, p), p)
    return len(fac) == 1 and fac[0][1] == 1


# -- F_{p^k} ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def conway_free_modulus(p: int, k: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 are enumerated in
    lexicographic order of (c_{k-1}, ..., c_0).
    """
    if k == 1:
        return (0, 1)
    for tail in product(range(p), repeat=k):
        cand = list(reversed(tail)) + [1]
        if cand[0] == 0:
            continue
        if is_irreducible_mod_p(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")


@dataclass(frozen=True)
class FpkElem:
    """Element of F_{p^k} = F_p[t]/(m(t)), m from :func:`conway_free_modulus`."""

    p: int
    k: int
    coeffs: tuple  # length k, entries in [0, p)

    @classmethod
    def from_int(cls, p: int, k: int, a: int) -> "FpkElem":
        return cls(p, k, (a % p,) + (0,) * (k - 1))

    @classmethod
    def from_list(cls, p: int, k: int, c) -> "FpkElem":
        c = [x % p for x in c]
        m = list(conway_free_modulus(p, k))
        if len(c) > k:
            c = rem(trim(c), m, p)
        c = list(c) + [0] * (k - len(c))
        return cls(p, k, tuple(c))

    @classmethod
    def generator(cls, p: int, k: int) -> "FpkElem":
        return cls.from_list(p, k, [0, 1])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def _coerce(self, other) -> "FpkElem":
        if isinstance(other, FpkElem):
            if (other.p, other.k) != (self.p, self.k):
                raise ValueError("mixing different fields")
            return other
        return FpkElem.from_int(self.p, self.k, int(other))

    def __add__(self, other):
        o = self._coerce(other)
        return FpkElem(self.p, self.k, tuple((a + b) % self.p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FpkElem(self.p, self.k, tuple((-a) % self.p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if self.k == 1:
            return FpkElem(self.p, 1, (self.coeffs[0] * o.coeffs[0] % self.p,))
        prod = mul(trim(list(self.coeffs)), trim(list(o.coeffs)), self.p)
        return FpkElem.from_list(self.p, self.k, prod)

    __rmul__ = __mul__

    def inverse(self) -> "FpkElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in F_{p^k}")
        if self.k == 1:
            return FpkElem(self.p, 1, (pow(self.coeffs[0], -1, self.p),))
        m = list(conway_free_modulus(self.p, self.k))
        g, s, _ = xgcd(trim(list(self.coeffs)), m, self.p)
        return FpkElem.from_list(self.p, self.k, s)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = FpkElem.from_int(self.p, self.k, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __repr__(self) -> str:
        if self.k == 1:
            return f"F{self.p}({self.coeffs[0]})"
        return f"F{self.p}^{self.k}({list(self.coeffs)})"

    def to_json(self):
        return {"p": self.p, "k": self.k, "coeffs": list(self.coeffs)}


def field_elements(p: int, k: int) -> Iterator[FpkElem]:
    for c in product(range(p), repeat=k):
        yield FpkElem(p, k, tuple(c))


# polynomial helpers over F_q with FpkElem entries -----------------------------------

def _q_trim(a):
    while a and a[-1].is_zero():
        a.pop()
    return a


def _q_rem(a, b):
    r = list(a)
    db = len(b) - 1
    inv = b[-1].inverse()
    for i in range(len(r) - 1 - db, -1, -1):
        t = r[i + db] * inv
        if not t.is_zero():
            for j in range(db + 1):
                r[i + j] = r[i + j] - t * b[j]
    return _q_trim(r[:db])


def _q_div(a, b):
    r = list(a)
    db = len(b) - 1
    inv = b[-1].inverse()
    q = [None] * (len(r) - db)
    for i in range(len(r) - 1 - db, -1, -1):
        t = r[i + db] * inv
        q[i] = t
        if not t.is_zero():
            for j in range(db + 1):
                r[i + j] = r[i + j] - t * b[j]
    return _q_trim(q)


def _q_mul(a, b):
    if not a or not b:
        return []
    zero = a[0] * 0
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x.is_zero():
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
    return _q_trim(out)


def _q_monic(a):
    inv = a[-1].inverse()
    return [x * inv for x in a]


def _q_gcd(a, b):
    while b:
        a, b = b, _q_rem(a, b)
    return _q_monic(a) if a else a


def _q_powmod(base, e, m):
    one = m[0] * 0 + 1
    result = [one]
    base = _q_rem(base, m)
    while e:
        if e & 1:
            result = _q_rem(_q_mul(result, base), m)
        e >>= 1
        if e:
            base = _q_rem(_q_mul(base, base), m)
    return result


def _q_split_linear(a, p, k, stream):
    """All roots of a squarefree monic a over F_q that splits into linear factors."""
    n = len(a) - 1
    if n == 0:
        return []
    if n == 1:
        return [-(a[0] / a[1])]
    q = p ** k
    while True:
        delta = FpkElem.from_list(p, k, [next(stream) for _ in range(k)])
        x_plus = [delta, FpkElem.from_int(p, k, 1)]
        if p == 2:
            # absolute trace of (x + delta) * gamma for a random gamma
            gamma = FpkElem.from_list(p, k, [next(stream) for _ in range(k)])
            cur = _q_rem([delta * gamma, gamma], a)
            t = list(cur)
            for _ in range(k - 1):
                cur = _q_rem(_q_mul(cur, cur), a)
                t = _q_add(t, cur)
            g = _q_gcd(a, t) if t else []
        else:
            pw = _q_powmod(x_plus, (q - 1) // 2, a)
            pw = _q_sub_one(pw, p, k)
            g = _q_gcd(a, pw) if pw else []
        if g and 1 < len(g) < len(a):
            h = _q_div(a, g)
            return _q_split_linear(g, p, k, stream) + _q_split_linear(h, p, k, stream)


def _q_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = out[i] + v
    return _q_trim(out)


def _q_sub_one(a, p, k):
    out = list(a) if a else [FpkElem.from_int(p, k, 0)]
    out[0] = out[0] - 1
    return _q_trim(out)


def roots_in_Fpk(a: IntPoly, p: int, k: int) -> list:
    """Roots of a in F_{p^k} as [(FpkElem, multiplicity)].

    Roots are returned sorted by their coefficient vectors.
    """
    out = []
    for fac, e in factor_mod_p(a, p):
        d = len(fac) - 1
        if k % d:
            continue
        fq = [FpkElem.from_int(p, k, c) for c in fac]
        stream = _stream(f"roots:{p}:{k}:{fac}", p)
        for r in _q_split_linear(fq, p, k, stream):
            out.append((r, e))
    out.sort(key=lambda t: (t[0].coeffs, t[1]))
    return out
