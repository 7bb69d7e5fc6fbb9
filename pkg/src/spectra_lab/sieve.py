"""Good-reduction sieve: primes where a wandering critical point turns periodic.

Points of P^1(F_{p^k}) are FpkElem values or INFINITY; per-prime work stays
in affine coordinates with infinity handled explicitly.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .dynatomic import galois_classes
from .errors import BudgetExceeded, HenselCrossCheckFailed, InvalidInput, NoNonPreperiodicCritical
from .exact_poly import FpkElem, IntPoly, factor_mod_p, roots_in_Fpk
from .exact_poly.modp import trim
from .exact_poly.primes import primes_in_range
from .pcf import QuadElem, critical_orbits
from .rational_map import INFINITY, RationalMap, critical_classes, require_good_reduction
from .rog import norm_vector, phi_p

DEFAULT_KMAX = 2
DEFAULT_PERIOD_BUDGET = 6


@dataclass(frozen=True)
class ReducedMap:
    p: int
    num: tuple  # coefficients of X^i Y^(d-i) mod p
    den: tuple
    degree: int

    def __call__(self, x, k: int = 1):
        """Image of x in P^1(F_{p^k}); k only matters for the image of infinity."""
        p, d = self.p, self.degree
        if x is INFINITY:
            if self.den[d] == 0:
                return INFINITY
            lead = self.num[d] * pow(self.den[d], -1, p) % p
            return FpkElem.from_int(p, k, lead)
        num = den = x * 0
        for i in range(d, -1, -1):
            num = num * x + self.num[i]
            den = den * x + self.den[i]
        if den.is_zero():
            return INFINITY
        return num * den.inverse()

    def to_json(self) -> dict:
        return {"p": self.p, "num": list(self.num), "den": list(self.den)}


def reduce_map(f: RationalMap, p: int) -> ReducedMap:
    require_good_reduction(f, p)
    Pc, Qc = f.hom_coeffs()
    return ReducedMap(p, tuple(c % p for c in Pc), tuple(c % p for c in Qc), f.degree)


@dataclass(frozen=True)
class CriticalPointModP:
    crit_id: int
    point: object  # FpkElem or INFINITY
    k: int

    def key(self) -> tuple:
        return _point_key(self.point)


def _point_key(pt) -> tuple:
    if pt is INFINITY:
        return ("inf",)
    return tuple(trim(list(pt.coeffs)))


def critical_points_mod_p(f: RationalMap, p: int, kmax: int = DEFAULT_KMAX, classes=None) -> list:
    """Reductions of the critical points lying in F_{p^k}, k <= kmax (plus infinity).

    Each point carries the id of the characteristic-zero critical class it
    comes from, and the degree k of the smallest field containing it.
    """
    require_good_reduction(f, p)
    out = []
    for cc in classes if classes is not None else critical_classes(f):
        if cc.is_infinity:
            out.append(CriticalPointModP(cc.crit_id, INFINITY, 1))
            continue
        g = cc.minpoly
        gbar = trim([c % p for c in g.c])
        if len(gbar) - 1 < g.degree():
            # leading coefficient vanishes mod p: some roots reduce to infinity
            out.append(CriticalPointModP(cc.crit_id, INFINITY, 1))
        if len(gbar) <= 1:
            continue
        for fac, _ in factor_mod_p(IntPoly(gbar), p):
            e = len(fac) - 1
            if e > kmax:
                continue
            for r, _ in roots_in_Fpk(IntPoly(fac), p, e):
                out.append(CriticalPointModP(cc.crit_id, r, e))
    uniq = {}
    for cp in out:
        uniq.setdefault((cp.crit_id, cp.key()), cp)
    return sorted(uniq.values(), key=lambda c: (c.crit_id, c.k, c.key()))


def orbit_mod_p(start, fbar: ReducedMap) -> tuple:
    """(tail, cycle_len) of start under fbar by Brent's algorithm."""
    p, d = fbar.p, fbar.degree
    k = 1 if start is INFINITY else start.k
    if k == 1:
        s = p if start is INFINITY else start.coeffs[0]
        Pc = np.array(fbar.num, np.int64)
        Qc = np.array(fbar.den, np.int64)
        tail, cyc = kernels.orbit_mod_p(Pc, Qc, d, int(s), p)
        tail, cyc = int(tail), int(cyc)
    else:
        tail, cyc = _brent(lambda x: fbar(x, k), start)
    if tail + cyc > p ** k + 1:  # pragma: no cover - finite-space bound
        raise AssertionError("orbit longer than the number of points")
    return tail, cyc


def _brent(step, x0) -> tuple:
    power = lam = 1
    tortoise, hare = x0, step(x0)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
    tortoise = hare = x0
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = step(tortoise), step(hare)
        mu += 1
    return mu, lam


@dataclass(frozen=True)
class PrimeHit:
    p: int
    crit_id: int
    k: int
    tail: int
    cycle_len: int
    point: tuple = ()  # reduced critical point: F_{p^k} coefficients (trimmed) or ("inf",)

    def to_json(self) -> dict:
        return {"p": self.p, "crit_id": self.crit_id, "k": self.k, "tail": self.tail,
                "cycle_len": self.cycle_len,
                "point": "inf" if self.point == ("inf",) else (list(self.point) or [0])}


@dataclass
class SieveReport:
    pmin: int
    pmax: int
    kmax: int
    marked: list
    hits: list = field(default_factory=list)
    misses: dict = field(default_factory=dict)  # tail -> count
    bad_primes: list = field(default_factory=list)
    excluded: list = field(default_factory=list)  # (p, crit_id) landing in X_v
    primes_scanned: int = 0

    def to_json(self) -> dict:
        return {
            "prime_range": [self.pmin, self.pmax],
            "kmax": self.kmax,
            "marked": self.marked,
            "hits": [h.to_json() for h in self.hits],
            "misses": {str(k): v for k, v in sorted(self.misses.items())},
            "bad_primes": self.bad_primes,
            "excluded": [list(e) for e in self.excluded],
            "primes_scanned": self.primes_scanned,
        }


def _periodic_orbit_points(f: RationalMap, report) -> list:
    pts = []
    for o in report.orbits:
        if o.status == "periodic":
            pts.extend(o.orbit)
    return pts


def _reduce_point(z, p: int, k: int) -> list:
    """All reductions mod p of an exact point (two for a quadratic irrational)."""
    if z is INFINITY:
        return [INFINITY]
    if isinstance(z, QuadElem):
        vals = []
        for part in (z.a, z.b):
            if part.denominator % p == 0:
                return []
            vals.append(part.numerator * pow(part.denominator, -1, p) % p)
        Dp = z.D % p
        if Dp == 0:
            return [FpkElem.from_int(p, k, vals[0])]
        roots = roots_in_Fpk(IntPoly([-Dp, 0, 1]), p, 2)
        out = []
        for s, _ in roots:
            lifted = FpkElem.from_int(p, 2, vals[0]) + FpkElem.from_int(p, 2, vals[1]) * s
            out.append(lifted)
        return out
    z = Fraction(z)
    if z.denominator % p == 0:
        return [INFINITY]
    return [FpkElem.from_int(p, 1, z.numerator * pow(z.denominator, -1, p) % p)]


def _sieve_primes(f: RationalMap, primes: list, kmax: int, marked: list, periodic_pts: list):
    classes = critical_classes(f)
    hits, misses, bad, excluded = [], {}, [], []
    for p in primes:
        try:
            fbar = reduce_map(f, p)
        except InvalidInput:
            bad.append(p)
            continue
        xv = set()
        for z in periodic_pts:
            for r in _reduce_point(z, p, 1):
                xv.add(_point_key(r))
        for cp in critical_points_mod_p(f, p, kmax, classes):
            if cp.crit_id not in marked:
                continue
            if cp.key() in xv:
                excluded.append((p, cp.crit_id))
                continue
            tail, cyc = orbit_mod_p(cp.point, fbar)
            if tail == 0:
                hits.append(PrimeHit(p, cp.crit_id, cp.k, tail, cyc, _point_key(cp.point)))
            else:
                misses[tail] = misses.get(tail, 0) + 1
    return hits, misses, bad, sorted(set(excluded))


def _sieve_task(args):
    return _sieve_primes(*args)


def sieve(f: RationalMap, pmin: int, pmax: int, kmax: int = DEFAULT_KMAX, marked=None,
          jobs: int = 1) -> SieveReport:
    """Scan good primes in [pmin, pmax] for marked critical points that are
    periodic mod p (tail 0). Result is identical for any jobs value."""
    if pmin > pmax:
        raise InvalidInput(f"empty prime window [{pmin}, {pmax}]")
    if kmax < 1:
        raise InvalidInput("kmax must be >= 1")
    report = critical_orbits(f)
    if marked is None:
        marked = report.open_ids()
    marked = sorted(set(marked))
    if not marked:
        raise NoNonPreperiodicCritical("no non-preperiodic critical point (every critical orbit closes)")
    periodic_pts = _periodic_orbit_points(f, report)
    primes = primes_in_range(pmin, pmax)
    jobs = max(1, int(jobs))
    if jobs == 1 or len(primes) < 2:
        parts = [_sieve_primes(f, primes, kmax, marked, periodic_pts)]
    else:
        chunks = [primes[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_sieve_task, [(f, c, kmax, marked, periodic_pts) for c in chunks]))
    out = SieveReport(pmin, pmax, kmax, marked, primes_scanned=len(primes))
    for hits, misses, bad, excl in parts:
        out.hits.extend(hits)
        for t, c in misses.items():
            out.misses[t] = out.misses.get(t, 0) + c
        out.bad_primes.extend(bad)
        out.excluded.extend(excl)
    _canonicalize(out)
    return out


def _canonicalize(r: SieveReport) -> None:
    r.hits.sort(key=lambda h: (h.p, h.crit_id, h.k, h.point))
    r.bad_primes.sort()
    r.excluded = sorted(set(map(tuple, r.excluded)))
    r.misses = dict(sorted(r.misses.items()))


def merge_reports(a: SieveReport, b: SieveReport) -> SieveReport:
    """Combine reports over adjacent prime windows."""
    if a.kmax != b.kmax or a.marked != b.marked:
        raise InvalidInput("reports were produced with different settings")
    out = SieveReport(min(a.pmin, b.pmin), max(a.pmax, b.pmax), a.kmax, list(a.marked),
                      hits=a.hits + b.hits, bad_primes=a.bad_primes + b.bad_primes,
                      excluded=a.excluded + b.excluded,
                      primes_scanned=a.primes_scanned + b.primes_scanned)
    for src in (a.misses, b.misses):
        for t, c in src.items():
            out.misses[t] = out.misses.get(t, 0) + c
    _canonicalize(out)
    return out


def attach_candidates(f: RationalMap, hit: PrimeHit, period_budget: int = DEFAULT_PERIOD_BUDGET) -> list:
    """Class vectors of exact period hit.cycle_len with positive valuation at hit.p,
    smallest minpoly first."""
    if hit.cycle_len > period_budget:
        raise BudgetExceeded(
            f"budget exceeded: cycle length {hit.cycle_len} above period budget {period_budget}"
        )
    out = []
    for cls in galois_classes(f, hit.cycle_len):
        if cls.is_superattracting():
            continue
        cv = norm_vector(cls)
        if phi_p(cv.vector, hit.p) > 0:
            out.append(cv)
    out.sort(key=lambda cv: (cv.cls.minpoly.degree(), list(cv.cls.minpoly.c)))
    return out


def attach_class(f: RationalMap, hit: PrimeHit, period_budget: int = DEFAULT_PERIOD_BUDGET):
    """The class vector a prime hit guarantees (Hensel): positive valuation at p."""
    cands = attach_candidates(f, hit, period_budget)
    if not cands:
        raise HenselCrossCheckFailed(
            f"Hensel cross-check failed: no period-{hit.cycle_len} class with positive "
            f"valuation at {hit.p}"
        )
    return cands[0]
