"""Factorization over Z: squarefree split, Hensel lifting, Zassenhaus recombination."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt

from ..errors import BudgetExceeded, InvalidInput
from . import modp
from .intpoly import IntPoly, NotDivisible, exact_quotient, squarefree_decomposition

DEFAULT_SUBSET_CAP = 12
DEFAULT_DEGREE_CAP = 600
_PRIME_CANDIDATES = 6


@dataclass
class Factorization:
    unit: int
    content: Fraction
    factors: list = field(default_factory=list)  # [(IntPoly, multiplicity)]

    def expand(self) -> IntPoly:
        out = IntPoly.const(1)
        for f, e in self.factors:
            out = out * f ** e
        scale = self.unit * self.content
        if scale.denominator != 1:
            raise ValueError("non-integral content cannot expand to an IntPoly")
        return out * int(scale)

    def irreducible_factors(self) -> list:
        return [f for f, _ in self.factors]


def _small_primes():
    p = 3
    while True:
        if all(p % q for q in range(3, isqrt(p) + 1, 2)):
            yield p
        p += 2


def _mod_list(c, m):
    return [x % m for x in c]


def _sym(x, m):
    x %= m
    return x - m if x > m // 2 else x


def _mul_mod(a, b, m):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return modp.trim([v % m for v in out])


def _add_mod(a, b, m):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % m
    return modp.trim(out)


def _sub_mod(a, b, m):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] = (out[i] - v) % m
    return modp.trim(out)


def _divmod_monic(a, h, m):
    # h monic
    r = list(a)
    dh = len(h) - 1
    if len(r) - 1 < dh:
        return [], modp.trim(r)
    q = [0] * (len(r) - dh)
    for i in range(len(r) - 1 - dh, -1, -1):
        t = r[i + dh] % m
        q[i] = t
        if t:
            for j in range(dh + 1):
                r[i + j] = (r[i + j] - t * h[j]) % m
    return modp.trim(q), modp.trim([x % m for x in r[:dh]])


def _hensel_step(f, g, h, s, t, m):
    """Lift f = g*h mod m (h monic, s*g + t*h = 1 mod m) to modulus m^2."""
    M = m * m
    e = _sub_mod(_mod_list(f, M), _mul_mod(g, h, M), M)
    q, r = _divmod_monic(_mul_mod(s, e, M), h, M)
    g2 = _add_mod(_add_mod(g, _mul_mod(t, e, M), M), _mul_mod(q, g, M), M)
    h2 = _add_mod(h, r, M)
    b = _sub_mod(_add_mod(_mul_mod(s, g2, M), _mul_mod(t, h2, M), M), [1], M)
    c, d = _divmod_monic(_mul_mod(s, b, M), h2, M)
    s2 = _sub_mod(s, d, M)
    t2 = _sub_mod(_sub_mod(t, _mul_mod(t, b, M), M), _mul_mod(c, g2, M), M)
    return g2, h2, s2, t2, M


def _product_mod(polys, m):
    out = [1]
    for q in polys:
        out = _mul_mod(out, q, m)
    return out


def hensel_lift(f: IntPoly, factors: list, p: int, exponent_target: int) -> tuple[list, int]:
    """Lift monic factors of f mod p (f = lc * prod) to monic factors mod M >= p^target.

    Returns (lifted factors, M) with M = p^(2^j).
    """
    lc = f.lc()
    M_goal = p ** exponent_target
    lifted, M = _lift_tree(list(f.c), lc, factors, p, M_goal)
    return lifted, M


def _lift_tree(fc, lc, factors, p, M_goal):
    if len(factors) == 1:
        M = p
        while M < M_goal:
            M *= M
        inv = pow(lc, -1, M)
        return [modp.trim([x * inv % M for x in fc])], M
    half = len(factors) // 2
    A = _product_mod(factors[:half], p)
    B = _product_mod(factors[half:], p)
    g = modp.scale(A, lc, p)
    h = B
    one, s, t = modp.xgcd(g, h, p)
    if one != [1]:
        raise AssertionError("modular factors are not coprime")
    m = p
    while m < M_goal:
        g, h, s, t, m = _hensel_step(fc, g, h, s, t, m)
    inv = pow(lc, -1, m)
    A_lift = modp.trim([x * inv % m for x in g])
    left, M1 = _lift_tree(A_lift, 1, factors[:half], p, M_goal)
    right, M2 = _lift_tree(h, 1, factors[half:], p, M_goal)
    assert M1 == M2 == m
    return left + right, m


def _coefficient_bound(f: IntPoly) -> int:
    # Landau-Mignotte: any factor of f has coefficients <= 2^deg * ||f||_2;
    # the candidates carry an extra lc(f)
    norm2 = isqrt(sum(a * a for a in f.c)) + 1
    return (1 << f.degree()) * norm2 * abs(f.lc())


def _choose_prime(f: IntPoly):
    best = None
    tried = 0
    for p in _small_primes():
        if f.lc() % p == 0:
            continue
        fp = modp.monic(modp.reduce(f.c, p), p)
        if len(modp.gcd(fp, modp.derivative(fp, p), p)) > 1:
            continue
        facs = modp.factor_list_mod_p(fp, p)
        if all(e == 1 for _, e in facs):
            if best is None or len(facs) < len(best[1]):
                best = (p, [g for g, _ in facs])
            tried += 1
            if len(facs) == 1 or tried >= _PRIME_CANDIDATES:
                break
    return best


def factor_squarefree(f: IntPoly, subset_cap: int = DEFAULT_SUBSET_CAP) -> list:
    """Irreducible factors of a primitive squarefree f, Zassenhaus style."""
    n = f.degree()
    if n <= 1:
        return [f]
    if f.c[0] == 0:
        # pull out x directly; keeps the prime search simple
        return sorted([IntPoly.x()] + factor_squarefree(IntPoly(f.c[1:]), subset_cap), key=_key)
    p, mfacs = _choose_prime(f)
    if len(mfacs) == 1:
        return [f]
    bound = 2 * _coefficient_bound(f) + 1
    k = 1
    while p ** k <= bound:
        k += 1
    lifted, M = hensel_lift(f, mfacs, p, k)
    return _recombine(f, lifted, M, subset_cap)


def _recombine(f: IntPoly, lifted: list, M: int, subset_cap: int) -> list:
    found = []
    remaining = list(range(len(lifted)))
    g = f
    s = 1
    while 2 * s <= len(remaining):
        if s > subset_cap:
            raise BudgetExceeded(
                f"budget exceeded: Zassenhaus recombination needs subsets larger than {subset_cap}"
            )
        hit = False
        lc = g.lc()
        const_target = lc * g.c[0]
        for S in combinations(remaining, s):
            cand = [lc % M]
            for i in S:
                cand = _mul_mod(cand, lifted[i], M)
            # constant-term filter before any polynomial division
            c0 = _sym(cand[0], M) if cand else 0
            if c0 == 0 or const_target % c0:
                continue
            poly = IntPoly([_sym(x, M) for x in cand]).primitive()
            try:
                q = exact_quotient(g, poly)
            except NotDivisible:
                continue
            found.append(poly)
            g = q.primitive() if q.lc() < 0 else q
            remaining = [i for i in remaining if i not in S]
            hit = True
            break
        if not hit:
            s += 1
    if g.degree() > 0:
        found.append(g.primitive())
    return sorted(found, key=_key)


def _key(p: IntPoly):
    return (p.degree(), list(p.c))


def factor_over_Z(a: IntPoly, degree_cap: int = DEFAULT_DEGREE_CAP,
                  subset_cap: int = DEFAULT_SUBSET_CAP) -> Factorization:
    """Complete factorization of a nonzero integer polynomial.

    Output factors are primitive with positive leading coefficient, sorted by
    (degree, coefficient list); unit * content * prod f^e == a exactly.
    """
    if not a:
        raise InvalidInput("factor_over_Z of the zero polynomial")
    if a.degree() > degree_cap:
        raise BudgetExceeded(f"budget exceeded: degree {a.degree()} above cap {degree_cap}")
    unit = 1 if a.lc() > 0 else -1
    content = Fraction(a.content())
    items = []
    for part, e in squarefree_decomposition(a):
        for g in factor_squarefree(part, subset_cap):
            items.append((g, e))
    items.sort(key=lambda t: (_key(t[0]), t[1]))
    return Factorization(unit=unit, content=content, factors=items)
