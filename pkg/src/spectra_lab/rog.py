"""Valuation coordinates for multiplicative relations among multipliers.

A nonzero rational q is sent to the vector of its prime exponents, which is
q modulo roots of unity (here only the sign) written additively. Stored values
are exponents, not exponent * log p; log p > 0 never changes a sign or a rank.
The archimedean coordinate is not stored: over Q it is fixed by the product
formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .dynatomic import AlgebraicClass
from .errors import InternalAssertion, InvalidInput, NoNonPreperiodicCritical
from .exact_poly.primes import factor_integer, is_prime


@dataclass(frozen=True)
class RogVector:
    """Sparse prime -> rational exponent map with no zero entries.

    Keys are primes, except for composite cofactors that could not be split
    (see :func:`rog_of_rational`); :func:`rank` refines those to a coprime
    basis before eliminating.
    """

    entries: tuple = ()  # ((key, Fraction), ...) ascending by key

    @classmethod
    def from_dict(cls, d: dict) -> "RogVector":
        return cls(tuple(sorted((int(k), Fraction(v)) for k, v in d.items() if v != 0)))

    def as_dict(self) -> dict:
        return dict(self.entries)

    def get(self, p: int) -> Fraction:
        for k, v in self.entries:
            if k == p:
                return v
        return Fraction(0)

    def keys(self) -> list:
        return [k for k, _ in self.entries]

    def __add__(self, other: "RogVector") -> "RogVector":
        d = self.as_dict()
        for k, v in other.entries:
            d[k] = d.get(k, 0) + v
        return RogVector.from_dict(d)

    def scale(self, s) -> "RogVector":
        s = Fraction(s)
        return RogVector.from_dict({k: v * s for k, v in self.entries})

    def __bool__(self) -> bool:
        return bool(self.entries)

    def to_json(self) -> dict:
        return {str(k): str(v) for k, v in self.entries}

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}: {v}" for k, v in self.entries) + "}"


def rog_of_rational(q) -> RogVector:
    q = Fraction(q)
    if q == 0:
        raise InvalidInput("rog(0) is infinite; 0 has no valuation vector")
    d: dict = {}
    for p, e in factor_integer(q.numerator).items():
        d[p] = d.get(p, 0) + e
    for p, e in factor_integer(q.denominator).items():
        d[p] = d.get(p, 0) - e
    return RogVector.from_dict(d)


def phi_p(v: RogVector, p: int) -> Fraction:
    """Valuation coordinate at p (the exponent; the log p factor is dropped)."""
    return v.get(p)


def fold_involution(v: RogVector, w: RogVector) -> RogVector:
    """(v + w) / 2 for a tau-conjugate pair; the identity when tau fixes v."""
    return (v + w).scale(Fraction(1, 2))


@dataclass(frozen=True)
class ClassVector:
    cls: AlgebraicClass
    vector: RogVector
    norm: Fraction

    def to_json(self) -> dict:
        return {"class": self.cls.to_json(), "vector": self.vector.to_json(), "norm": str(self.norm)}


def class_norm(minpoly) -> Fraction:
    """Product of the roots: (-1)^deg c_0 / c_deg."""
    c = minpoly.c
    deg = len(c) - 1
    return Fraction((-1) ** deg * c[0], c[-1])


def norm_vector(cls: AlgebraicClass) -> ClassVector:
    N = class_norm(cls.minpoly)
    if N == 0:
        raise InvalidInput("zero multiplier excluded from Per*: superattracting class has no norm vector")
    return ClassVector(cls, rog_of_rational(abs(N)).scale(Fraction(1, cls.degree())), N)


# -- exact rank -----------------------------------------------------------------------------

def _coprime_basis(keys: set) -> dict:
    """Map every key to {basis element: exponent} with pairwise coprime bases."""
    basis = sorted(k for k in keys if k > 1)
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                a, b = basis[i], basis[j]
                g = gcd(a, b)
                if g > 1:
                    rest = {g, a // g, b // g} - {1}
                    basis = sorted((set(basis) - {a, b}) | rest)
                    changed = True
                    break
            if changed:
                break
    out = {}
    for k in keys:
        expo = {}
        m = k
        for b in basis:
            while m % b == 0:
                expo[b] = expo.get(b, 0) + 1
                m //= b
        out[k] = expo
    return out


def _refined_rows(vs: list) -> list:
    keys = {k for v in vs for k in v.keys()}
    if all(is_prime(k) for k in keys):
        return [v.as_dict() for v in vs]
    decomp = _coprime_basis(keys)
    rows = []
    for v in vs:
        row: dict = {}
        for k, val in v.entries:
            for b, e in decomp[k].items():
                row[b] = row.get(b, 0) + val * e
        rows.append(row)
    return rows


def rank(vs: list) -> int:
    """Exact Q-rank of a list of RogVectors."""
    rows = [r for r in _refined_rows(list(vs)) if any(r.values())]
    if not rows:
        return 0
    cols = sorted({k for r in rows for k in r})
    M = [[Fraction(r.get(c, 0)) for c in cols] for r in rows]
    rk = 0
    for col in range(len(cols)):
        piv = next((i for i in range(rk, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for i in range(rk + 1, len(M)):
            if M[i][col]:
                t = M[i][col] / M[rk][col]
                M[i] = [a - t * b for a, b in zip(M[i], M[rk])]
        rk += 1
        if rk == len(M):
            break
    return rk


# -- triangle certificates ------------------------------------------------------------------

@dataclass
class TriangleCertificate:
    """Rows (class vector lambda_i, prime v_i) with phi_matrix[i][j] = phi_{v_j}(lambda_i)."""

    rows: list = field(default_factory=list)
    phi_matrix: list = field(default_factory=list)
    verified: bool = False
    witness: tuple | None = None
    reason: str = ""
    target_dim: int = 0
    source: str = ""
    status: str = "complete"

    @property
    def achieved_dim(self) -> int:
        return len(self.rows) if self.verified else 0

    @property
    def primes(self) -> list:
        return [p for _, p in self.rows]

    def to_json(self) -> dict:
        return {
            "rows": [{"class_vector": cv.to_json(), "prime": p} for cv, p in self.rows],
            "primes": self.primes,
            "phi_matrix": [[str(x) for x in row] for row in self.phi_matrix],
            "verified": self.verified,
            "witness": list(self.witness) if self.witness else None,
            "reason": self.reason,
            "target_dim": self.target_dim,
            "achieved_dim": self.achieved_dim,
            "source": self.source,
            "status": self.status,
        }


def make_certificate(rows: list, **kw) -> TriangleCertificate:
    cert = TriangleCertificate(rows=list(rows), **kw)
    cert.phi_matrix = [[phi_p(cv.vector, p) for _, p in rows] for cv, _ in rows]
    verify_upper_triangle(cert)
    return cert


def verify_upper_triangle(cert: TriangleCertificate) -> tuple:
    """Check phi_{v_i}(lambda_i) > 0, phi_{v_j}(lambda_i) = 0 for j > i, all >= 0.

    The matrix is recomputed from the rows. Returns (ok, witness) with a
    1-based (i, j) witness for the first violation; also updates cert.
    """
    rows = cert.rows
    M = [[phi_p(cv.vector, p) for _, p in rows] for cv, _ in rows]
    cert.phi_matrix = M
    for i in range(len(rows)):
        for j in range(len(rows)):
            x = M[i][j]
            bad = None
            if x < 0:
                bad = "negative valuation coordinate"
            elif i == j and x <= 0:
                bad = "diagonal entry not positive"
            elif j > i and x != 0:
                bad = "nonzero entry above the triangle"
            if bad:
                cert.verified, cert.witness, cert.reason = False, (i + 1, j + 1), bad
                return False, cert.witness
    cert.verified, cert.witness, cert.reason = True, None, ""
    return True, None


def independence_certificate(f, target_dim: int, prime_max: int = 100, period_max: int = 4,
                             kmax: int = 2, marked=None) -> TriangleCertificate:
    """Greedy upper-triangle system for the norm vectors of multiplier classes.

    Primary route: walk sieve hits in ascending prime order and attach a class
    with positive valuation at the hit prime, provided every earlier row has
    valuation 0 there. When the sieve has no non-preperiodic critical point to
    work with (PCF and exceptional maps), the primes dividing class norms of
    period <= period_max are scanned in the same greedy way.
    """
    from .dynatomic import galois_classes
    from .sieve import attach_candidates, sieve

    if target_dim < 1:
        raise InvalidInput("target dimension must be >= 1")
    rows: list = []

    def try_add(cv, p) -> bool:
        if any(phi_p(prev.vector, p) != 0 for prev, _ in rows):
            return False
        if phi_p(cv.vector, p) <= 0:
            return False
        trial = make_certificate(rows + [(cv, p)])
        if trial.verified:
            rows.append((cv, p))
            return True
        return False

    try:
        report = sieve(f, 2, prime_max, kmax, marked=marked)
        source = "sieve"
        used = set()
        for hit in report.hits:
            if len(rows) >= target_dim:
                break
            if hit.p in used or hit.cycle_len > period_max:
                continue
            for cv in attach_candidates(f, hit, period_max):
                if try_add(cv, hit.p):
                    used.add(hit.p)
                    break
    except NoNonPreperiodicCritical:
        source = "norm-scan"
        cands = []
        for n in range(1, period_max + 1):
            for cls in galois_classes(f, n):
                if not cls.is_superattracting():
                    cands.append(norm_vector(cls))
        primes = sorted({k for cv in cands for k in cv.vector.keys() if k <= prime_max and is_prime(k)})
        for p in primes:
            if len(rows) >= target_dim:
                break
            for cv in cands:
                if try_add(cv, p):
                    break
    cert = make_certificate(rows, target_dim=target_dim, source=source)
    if len(rows) < target_dim:
        cert.status = "budget exceeded"
    if cert.verified and rank([cv.vector for cv, _ in rows]) != len(rows):  # pragma: no cover
        raise InternalAssertion("verified triangle system with dependent rows")
    return cert
