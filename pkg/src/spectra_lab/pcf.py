"""Critical-orbit analysis: exact orbit closure, rank growth, PCF verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dynatomic import galois_classes
from .errors import InvalidInput
from .exact_poly.primes import factor_integer
from .rational_map import INFINITY, RationalMap, critical_classes
from .rog import norm_vector, rank

DEFAULT_STEP_BUDGET = 64
DEFAULT_HEIGHT_BUDGET_BITS = 4096
DEFAULT_RANK_PERIODS = 3
MONOTONE_STEPS = 10


class QuadElem:
    """a + b sqrt(D) in Q(sqrt(D)), D a squarefree integer other than 0, 1."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b, D: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    def _lift(self, o) -> "QuadElem":
        if isinstance(o, QuadElem):
            return o
        return QuadElem(o, 0, self.D)

    def __add__(self, o):
        o = self._lift(o)
        return QuadElem(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.D)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return QuadElem(self.a * o.a + self.D * self.b * o.b, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.D * self.b * self.b

    def __truediv__(self, o):
        o = self._lift(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        conj = QuadElem(o.a, -o.b, o.D)
        t = self * conj
        return QuadElem(t.a / n, t.b / n, self.D)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, o):
        if isinstance(o, QuadElem):
            return (self.a, self.b, self.D) == (o.a, o.b, o.D)
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.D)) if self.b else hash(self.a)

    def height_bits(self) -> int:
        return max(abs(v).bit_length() for v in
                   (self.a.numerator, self.a.denominator, self.b.numerator, self.b.denominator))

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "D": self.D}

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.D}))"


def _squarefree_split(n: int) -> tuple:
    """n = s^2 * D with D squarefree (sign kept in D)."""
    if n == 0:
        return 0, 0
    s, D = 1, (1 if n > 0 else -1)
    for p, e in factor_integer(abs(n)).items():
        s *= p ** (e // 2)
        if e % 2:
            D *= p
    return s, D


def _height(z) -> int:
    if z is INFINITY:
        return 0
    if isinstance(z, QuadElem):
        return z.height_bits()
    return max(abs(z.numerator).bit_length(), abs(z.denominator).bit_length())


def _point_json(z):
    if z is INFINITY:
        return "inf"
    if isinstance(z, QuadElem):
        return z.to_json()
    return str(z)


def _apply(f: RationalMap, z):
    if z is INFINITY:
        Pc, Qc = f.hom_coeffs()
        if Qc[-1] == 0:
            return INFINITY
        return Fraction(Pc[-1], Qc[-1])
    pv, qv = f.apply_projective(z, 1)
    if (qv.is_zero() if isinstance(qv, QuadElem) else qv == 0):
        return INFINITY
    out = pv / qv
    if isinstance(out, QuadElem) and out.b == 0:
        return out.a
    return out


def critical_point_representative(cc):
    """One exact root of a critical class: INFINITY, a Fraction, or a QuadElem."""
    if cc.is_infinity:
        return INFINITY
    g = cc.minpoly
    if g.degree() == 1:
        return Fraction(-g.c[0], g.c[1])
    if g.degree() == 2:
        c, b, a = g.c
        s, D = _squarefree_split(b * b - 4 * a * c)
        if D == 1:  # pragma: no cover - irreducible quadratics have non-square discriminant
            return Fraction(-b + s, 2 * a)
        return QuadElem(Fraction(-b, 2 * a), Fraction(s, 2 * a), D)
    return None


@dataclass
class CriticalOrbit:
    crit_id: int
    minpoly: list | None
    exactness: str  # rational | quadratic | unsupported-exactness
    status: str  # periodic | preperiodic | open | unsupported-exactness
    tail: int = 0
    cycle: int = 0
    steps: int = 0
    heights: list = field(default_factory=list)
    orbit: list = field(default_factory=list)  # exact points, start first

    def monotone_growth_run(self) -> int:
        """Longest run of consecutive strict height increases."""
        best = run = 0
        for a, b in zip(self.heights, self.heights[1:]):
            run = run + 1 if b > a else 0
            best = max(best, run)
        return best

    def to_json(self) -> dict:
        return {
            "crit_id": self.crit_id,
            "minpoly": self.minpoly,
            "exactness": self.exactness,
            "status": self.status,
            "tail": self.tail,
            "cycle": self.cycle,
            "steps": self.steps,
            "heights": self.heights,
            "orbit": [_point_json(z) for z in self.orbit],
        }


@dataclass
class CriticalOrbitReport:
    orbits: list
    step_budget: int
    height_budget_bits: int

    def by_status(self, status: str) -> list:
        return [o for o in self.orbits if o.status == status]

    def open_ids(self) -> list:
        return [o.crit_id for o in self.orbits if o.status == "open"]

    def all_finite(self) -> bool:
        return all(o.status in ("periodic", "preperiodic") for o in self.orbits)

    def to_json(self) -> dict:
        return {
            "orbits": [o.to_json() for o in self.orbits],
            "step_budget": self.step_budget,
            "height_budget_bits": self.height_budget_bits,
        }


def critical_orbits(f: RationalMap, step_budget: int = DEFAULT_STEP_BUDGET,
                    height_budget_bits: int = DEFAULT_HEIGHT_BUDGET_BITS) -> CriticalOrbitReport:
    if step_budget < 1 or height_budget_bits < 1:
        raise InvalidInput("budgets must be positive")
    out = []
    for cc in critical_classes(f):
        z = critical_point_representative(cc)
        mp = None if cc.minpoly is None else [str(c) for c in cc.minpoly.c]
        if z is None:
            out.append(CriticalOrbit(cc.crit_id, mp, "unsupported-exactness", "unsupported-exactness"))
            continue
        exactness = "quadratic" if isinstance(z, QuadElem) else "rational"
        seen = {z: 0}
        orbit = [z]
        heights = [_height(z)]
        status, tail, cycle = "open", 0, 0
        steps = 0
        for step in range(1, step_budget + 1):
            z = _apply(f, z)
            steps = step
            if z in seen:
                tail = seen[z]
                cycle = step - tail
                status = "periodic" if tail == 0 else "preperiodic"
                break
            seen[z] = step
            orbit.append(z)
            heights.append(_height(z))
            if heights[-1] > height_budget_bits:
                break
        out.append(CriticalOrbit(cc.crit_id, mp, exactness, status, tail, cycle,
                                 steps, heights, orbit))
    return CriticalOrbitReport(out, step_budget, height_budget_bits)


def replay_orbit(f: RationalMap, orbit: CriticalOrbit) -> bool:
    """Re-run a finite orbit exactly and confirm the recorded collision."""
    if orbit.status not in ("periodic", "preperiodic"):
        return False
    pts = [orbit.orbit[0]]
    for _ in range(orbit.tail + orbit.cycle):
        pts.append(_apply(f, pts[-1]))
    return pts[orbit.tail + orbit.cycle] == pts[orbit.tail] and pts[:-1] == orbit.orbit[: len(pts) - 1]


@dataclass
class RankGrowth:
    dims: list  # dims[n-1] = rank of norm vectors of classes with period <= n
    vectors: dict = field(default_factory=dict)  # n -> [ClassVector]

    def strictly_increased(self) -> bool:
        return any(b > a for a, b in zip(self.dims, self.dims[1:]))

    def to_json(self) -> dict:
        return {
            "dims": self.dims,
            "vectors": {str(n): [cv.to_json() for cv in vs] for n, vs in self.vectors.items()},
        }


def rank_growth(f: RationalMap, nmax: int) -> RankGrowth:
    if nmax < 1:
        raise InvalidInput("nmax must be >= 1")
    dims = []
    acc: list = []
    per: dict = {}
    for n in range(1, nmax + 1):
        vs = [norm_vector(c) for c in galois_classes(f, n) if not c.is_superattracting()]
        per[n] = vs
        acc.extend(cv.vector for cv in vs)
        dims.append(rank(acc))
    return RankGrowth(dims, per)


@dataclass
class Verdict:
    verdict: str  # PCF | LikelyNonPCF | Unknown
    evidence: dict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


def classify(f: RationalMap, step_budget: int = DEFAULT_STEP_BUDGET,
             height_budget_bits: int = DEFAULT_HEIGHT_BUDGET_BITS,
             rank_periods: int = DEFAULT_RANK_PERIODS) -> Verdict:
    """PCF when every critical orbit closes exactly; LikelyNonPCF when an open
    orbit shows >= 10 steps of monotone height growth and the rank grows."""
    report = critical_orbits(f, step_budget, height_budget_bits)
    evidence: dict = {"critical_orbits": report.to_json()}
    if report.all_finite():
        evidence["certificate"] = [
            {"crit_id": o.crit_id, "tail": o.tail, "cycle": o.cycle,
             "steps": o.tail + o.cycle, "replayed": replay_orbit(f, o)}
            for o in report.orbits
        ]
        return Verdict("PCF", evidence)
    growing = [o.crit_id for o in report.by_status("open")
               if o.monotone_growth_run() >= MONOTONE_STEPS]
    evidence["monotone_open_orbits"] = growing
    if growing:
        rg = rank_growth(f, rank_periods)
        evidence["rank_growth"] = rg.dims
        if rg.strictly_increased():
            return Verdict("LikelyNonPCF", evidence)
    return Verdict("Unknown", evidence)
