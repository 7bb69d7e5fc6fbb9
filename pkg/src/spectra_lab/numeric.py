"""Floating-point dynamics: numeric multipliers, Lyapunov exponents, equidistribution.

Everything here works in double precision on top of the exact layer. Points
of the sphere are carried as homogeneous pairs (x, y) normalized so that
max(|x|, |y|) = 1, which keeps infinity and huge orbits finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import kernels
from .dynatomic import exact_period_form, fixed_point_form, galois_classes, infinity_free_model
from .errors import InvalidInput, NonConvergence
from .rational_map import INFINITY, Mobius, RationalMap, conjugate
from .roots import complex_roots

DEFAULT_BURN_IN = 50
DEFAULT_START = 0.3 + 0.7j
POLE_TOL = 1e-12
_FIX_MAXITER = 2000


# -- homogeneous evaluation ------------------------------------------------------------------

def _float_coeffs(f: RationalMap) -> tuple:
    Pc, Qc = f.hom_coeffs()
    return np.array([float(a) for a in Pc]), np.array([float(a) for a in Qc])


def _hom_eval(c: np.ndarray, x, y):
    """F(x, y), F_x, F_y for F = sum c_i x^i y^(d-i), vectorized over x, y."""
    d = c.shape[0] - 1
    xp = [np.ones_like(x)]
    yp = [np.ones_like(y)]
    for _ in range(d):
        xp.append(xp[-1] * x)
        yp.append(yp[-1] * y)
    F = sum(c[i] * xp[i] * yp[d - i] for i in range(d + 1))
    Fx = sum(i * c[i] * xp[i - 1] * yp[d - i] for i in range(1, d + 1))
    Fy = sum((d - i) * c[i] * xp[i] * yp[d - i - 1] for i in range(d))
    return F, Fx, Fy


def _normalize(x, y):
    s = np.maximum(np.abs(x), np.abs(y))
    s = np.where(s == 0, 1.0, s)
    return x / s, y / s


def to_homogeneous(z) -> tuple:
    """Complex array with inf entries -> normalized (x, y) arrays."""
    z = np.atleast_1d(np.asarray(z, np.complex128))
    inf = ~np.isfinite(z)
    x = np.where(inf, 1.0 + 0j, z)
    y = np.where(inf, 0j, 1.0 + 0j)
    return _normalize(x, y)


def spherical_derivative(f: RationalMap, z) -> np.ndarray:
    """|f'(z)| (1 + |z|^2) / (1 + |f(z)|^2), infinity allowed (as complex inf).

    Uses the homogeneous form |det DF| (|x|^2 + |y|^2) / (d (|P|^2 + |Q|^2)),
    which needs no chart change at infinity or at poles.
    """
    Pc, Qc = _float_coeffs(f)
    x, y = to_homogeneous(z)
    P, Px, Py = _hom_eval(Pc.astype(np.complex128), x, y)
    Q, Qx, Qy = _hom_eval(Qc.astype(np.complex128), x, y)
    det = Px * Qy - Py * Qx
    num = np.abs(det) * (np.abs(x) ** 2 + np.abs(y) ** 2)
    return num / (f.degree * (np.abs(P) ** 2 + np.abs(Q) ** 2))


def apply_float(f: RationalMap, z) -> np.ndarray:
    """f on complex arrays; inf in, inf out where appropriate."""
    Pc, Qc = _float_coeffs(f)
    x, y = to_homogeneous(z)
    P = _hom_eval(Pc.astype(np.complex128), x, y)[0]
    Q = _hom_eval(Qc.astype(np.complex128), x, y)[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = P / Q
    return np.where(Q == 0, complex(np.inf, 0), out)


# -- multipliers -----------------------------------------------------------------------------

@dataclass(frozen=True)
class NumericMultiplier:
    rho: complex
    chi: float  # n^-1 log|rho| in nats; -inf for rho = 0

    def to_json(self) -> dict:
        return {"rho": [_num(self.rho.real), _num(self.rho.imag)], "chi": _num(self.chi)}


def _num(x: float):
    """JSON-safe float: non-finite values become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def _chi(rho: complex, n: int) -> float:
    a = abs(rho)
    return math.log(a) / n if a > 0 else float("-inf")


def _chain_float(g: RationalMap, z0: complex, n: int):
    """(f^n)'(z0) as a product of f' along the orbit; None near a pole."""
    out = _orbit_float(g, z0, n)
    return None if out is None else out[0]


def _polish(g: RationalMap, z0: complex, n: int, steps: int = 8) -> complex:
    """Newton on f^n(z) - z. The integer exact-period form can be badly
    conditioned; as a fixed point of f^n a point with multiplier != 1 is not."""
    z = complex(z0)
    for _ in range(steps):
        out = _orbit_float(g, z, n)
        if out is None:
            return z
        rho, zn = out
        if abs(rho - 1) < 1e-8:
            return z
        step = (zn - z) / (rho - 1)
        if not math.isfinite(abs(step)) or abs(step) > 1e-3 * (1 + abs(z)):
            return z
        z -= step
        if abs(step) <= 1e-16 * (1 + abs(z)):
            break
    return z


def _refine_periodic(g: RationalMap, n: int, roots: list) -> list:
    """Re-solve the exact-period roots as fixed points of g^n.

    Roots of a large integer form can be far off where periodic points
    cluster (near poles, typically) even though their residual is tiny. With
    the roots of the lower-period forms added as seeds, the seeds cover every
    affine point of Fix(g^n), and a simultaneous Aberth pass on the map itself
    separates the clusters. When the seed count does not match (a form built
    by the squarefree fallback) each root only gets a local Newton polish.
    """
    seeds = list(roots)
    for m in range(1, n):
        if n % m == 0:
            low = exact_period_form(g, m).affine()
            if low.degree() >= 1:
                seeds.extend(complex_roots(low).roots)
    if len(seeds) != fixed_point_form(g, n).affine().degree():
        return [_polish(g, z, n) for z in roots]
    Pc, Qc = _float_coeffs(g)
    z, _, ok = kernels.aberth_fixed_points(Pc.astype(np.complex128), Qc.astype(np.complex128),
                                           g.degree, n, np.array(seeds, np.complex128),
                                           _FIX_MAXITER, 1e-14)
    if not ok or not np.all(np.isfinite(z)):
        return [_polish(g, w, n) for w in roots]
    return [complex(w) for w in z[: len(roots)]]


def _orbit_float(g: RationalMap, z0: complex, n: int):
    """((f^n)'(z0), f^n(z0)) or None when the orbit comes within POLE_TOL of a pole."""
    P, Q = g.num.c, g.den.c
    dP = [i * a for i, a in enumerate(P)][1:] or [0]
    dQ = [i * a for i, a in enumerate(Q)][1:] or [0]
    scaleQ = [abs(float(a)) for a in Q]

    def horner(c, z):
        acc = 0j
        for a in reversed(c):
            acc = acc * z + a
        return acc

    rho = 1 + 0j
    z = complex(z0)
    for _ in range(n):
        q = horner(Q, z)
        qs = sum(a * abs(z) ** i for i, a in enumerate(scaleQ))
        if abs(q) <= POLE_TOL * max(qs, 1e-300) or not math.isfinite(abs(z)):
            return None
        p = horner(P, z)
        rho *= (horner(dP, z) * q - p * horner(dQ, z)) / (q * q)
        z = p / q
    return rho, z


def _chain_mp(g: RationalMap, z0, n: int, bits: int):
    with mpmath.workprec(bits):
        P = [mpmath.mpf(a) for a in reversed(g.num.c)]
        Q = [mpmath.mpf(a) for a in reversed(g.den.c)]
        dP = [mpmath.mpf(i * a) for i, a in reversed(list(enumerate(g.num.c)))][:-1] or [0]
        dQ = [mpmath.mpf(i * a) for i, a in reversed(list(enumerate(g.den.c)))][:-1] or [0]
        tol = mpmath.mpf(2) ** (-bits // 2)
        rho = mpmath.mpc(1)
        z = z0
        for _ in range(n):
            q = mpmath.polyval(Q, z)
            qs = mpmath.polyval([abs(a) for a in Q], abs(z))
            if abs(q) <= tol * qs:
                return None
            p = mpmath.polyval(P, z)
            rho *= (mpmath.polyval(dP, z) * q - p * mpmath.polyval(dQ, z)) / (q * q)
            z = p / q
        return complex(rho)


def multipliers_numeric(f: RationalMap, n: int) -> list:
    """Multipliers at every point of exact period n (one entry per point).

    The roots of the exact-period form are found numerically in a model of f
    with no period-n point at infinity, refined as fixed points of f^n, and
    (f^n)' is the product of f' along each orbit. An orbit that brushes a pole
    at double precision is redone in mpmath at 106 and then 212 bits.
    """
    if n < 1:
        raise InvalidInput("period must be >= 1")
    g, _ = infinity_free_model(f, n, exact_only=True)
    E = exact_period_form(g, n).affine()
    out = []
    if E.degree() < 1:
        return out
    roots = _refine_periodic(g, n, complex_roots(E).roots)
    mp_roots = None
    for z0 in roots:
        rho = _chain_float(g, z0, n)
        bits = 106
        while rho is None:
            if bits > 212:
                raise NonConvergence(f"orbit of a period-{n} point stays within {POLE_TOL} of a pole")
            if mp_roots is None or mp_roots[0] != bits:
                with mpmath.workprec(bits):
                    rts = mpmath.polyroots([mpmath.mpf(a) for a in reversed(E.c)],
                                           maxsteps=400, extraprec=bits)
                rts = sorted(rts, key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))))
                mp_roots = (bits, rts)
            near = min(mp_roots[1], key=lambda r: abs(complex(r) - z0))
            rho = _chain_mp(g, near, n, bits)
            bits *= 2
        out.append(NumericMultiplier(complex(rho), _chi(rho, n)))
    return out


def exact_multiplier_roots(f: RationalMap, n: int, exact_only: bool = True) -> list:
    """Complex roots of sigma_n taken class by class, repeated by multiplicity."""
    out = []
    for cls in galois_classes(f, n, exact_only):
        rs = complex_roots(cls.minpoly).roots
        for r in rs:
            out.extend([complex(r)] * cls.multiplicity)
    return out


def match_multisets(a: list, b: list) -> float:
    """Greedy nearest matching; returns the worst |x - y| / max(1, |y|).

    Infinite when the sizes differ.
    """
    if len(a) != len(b):
        return float("inf")
    left = np.array(b, np.complex128)
    used = np.zeros(len(b), bool)
    worst = 0.0
    for x in sorted(a, key=lambda v: -abs(v)):
        dist = np.abs(left - x)
        dist[used] = np.inf
        j = int(np.argmin(dist))
        used[j] = True
        worst = max(worst, float(dist[j]) / max(1.0, abs(left[j])))
    return worst


def fixed_point_index_sum(f: RationalMap) -> complex:
    """sum of 1/(1 - rho) over Fix(f) (requires no multiplier equal to 1)."""
    total = 0j
    for m in multipliers_numeric(f, 1):
        if abs(1 - m.rho) < 1e-12:
            raise InvalidInput("parabolic fixed point: index sum needs multipliers != 1")
        total += 1 / (1 - m.rho)
    return total


@dataclass
class ChiRow:
    n: int
    max_chi: float
    mean_repelling_chi: float
    repelling: int
    points: int

    def to_json(self) -> dict:
        return {"n": self.n, "max_chi": _num(self.max_chi),
                "mean_repelling_chi": _num(self.mean_repelling_chi),
                "repelling": self.repelling, "points": self.points}


@dataclass
class ChiSequence:
    rows: list
    lyapunov: "LyapunovEstimate | None" = None

    def to_json(self) -> dict:
        out = {"rows": [r.to_json() for r in self.rows]}
        if self.lyapunov is not None:
            out["lyapunov"] = self.lyapunov.to_json()
            out["mean_minus_lyapunov"] = [
                _num(r.mean_repelling_chi - self.lyapunov.value) for r in self.rows
            ]
        return out


def chi_sequence(f: RationalMap, nmax: int, lyapunov: "LyapunovEstimate | None" = None) -> ChiSequence:
    """Per period n: max chi, and mean chi over repelling points of exact period n."""
    if nmax < 1:
        raise InvalidInput("nmax must be >= 1")
    rows = []
    for n in range(1, nmax + 1):
        ms = multipliers_numeric(f, n)
        chis = [m.chi for m in ms]
        rep = [m.chi for m in ms if abs(m.rho) > 1 + 1e-9]
        rows.append(ChiRow(n, max(chis) if chis else float("nan"),
                           float(np.mean(rep)) if rep else float("nan"), len(rep), len(ms)))
    return ChiSequence(rows, lyapunov)


# -- the measure of maximal entropy ----------------------------------------------------------

def sample_measure(f: RationalMap, samples: int, burn_in: int = DEFAULT_BURN_IN,
                   seed: int = 0, start: complex = DEFAULT_START) -> np.ndarray:
    """Points of a random backward orbit, burn-in discarded (inf = infinity).

    Each step picks one of the d preimages with a uniform draw from a numpy
    Generator seeded with `seed`, so runs are reproducible bit for bit.
    """
    if samples < 1 or burn_in < 1:
        raise InvalidInput("samples and burn_in must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.random(burn_in + samples)
    Pc, Qc = _float_coeffs(f)
    orbit = kernels.backward_orbit(Pc, Qc, f.degree, complex(start), u)
    if not np.all(np.isfinite(orbit) | np.isinf(orbit.real)):
        raise NonConvergence("backward orbit produced NaN preimages")
    return orbit[burn_in:]


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float  # nats
    stderr: float
    samples: int
    burn_in: int
    seed: int

    def lower_bound_ok(self, d: int) -> bool:
        """value >= log(d)/2 - 3 stderr."""
        return self.value >= math.log(d) / 2 - 3 * self.stderr

    def to_json(self) -> dict:
        return {"value": _num(self.value), "stderr": _num(self.stderr), "samples": self.samples,
                "burn_in": self.burn_in, "seed": self.seed}


def lyapunov_estimate(f: RationalMap, samples: int, burn_in: int = DEFAULT_BURN_IN,
                      seed: int = 0) -> LyapunovEstimate:
    """Average of log f^# over a backward-orbit sample of the maximal-entropy measure."""
    pts = sample_measure(f, samples, burn_in, seed)
    with np.errstate(divide="ignore"):
        logs = np.log(spherical_derivative(f, pts))
    logs = logs[np.isfinite(logs)]  # a sample landing on a critical point carries no weight
    if logs.size < 2:
        raise NonConvergence("too few finite samples for a Lyapunov estimate")
    return LyapunovEstimate(float(np.mean(logs)), float(np.std(logs, ddof=1) / math.sqrt(logs.size)),
                            samples, burn_in, seed)


# -- equidistribution ------------------------------------------------------------------------

def _sphere(x, y):
    """Unit-sphere coordinates of [x : y] (stereographic, infinity at the north pole)."""
    r = np.abs(x) ** 2 + np.abs(y) ** 2
    w = x * np.conj(y)
    return 2 * w.real / r, 2 * w.imag / r, (np.abs(x) ** 2 - np.abs(y) ** 2) / r


TEST_FUNCTIONS = {
    "const": ("g = 1", lambda s1, s2, s3: np.ones_like(s1)),
    "coord1": ("g = 2 Re z / (1 + |z|^2)", lambda s1, s2, s3: s1),
    "coord2": ("g = 2 Im z / (1 + |z|^2)", lambda s1, s2, s3: s2),
    "coord3": ("g = (|z|^2 - 1) / (|z|^2 + 1)", lambda s1, s2, s3: s3),
    "coord1sq": ("g = (2 Re z / (1 + |z|^2))^2", lambda s1, s2, s3: s1 * s1),
}


def test_function(fn_id: str):
    try:
        return TEST_FUNCTIONS[fn_id][1]
    except KeyError:
        raise InvalidInput(f"unknown test function {fn_id!r}; choose from {sorted(TEST_FUNCTIONS)}") from None


def evaluate_test_function(fn_id: str, z) -> np.ndarray:
    g = test_function(fn_id)
    x, y = to_homogeneous(z)
    return g(*_sphere(x, y))


def _infinity_period(f: RationalMap, n: int):
    """Exact period of infinity if it divides n, else None."""
    z = INFINITY
    for k in range(1, n + 1):
        z = f(z)
        if z is INFINITY:
            return k if n % k == 0 else None
    return None


def _infinity_multiplier(f: RationalMap, k: int) -> complex:
    h = conjugate(f, Mobius(0, 1, 1, 0))  # infinity -> 0
    rho = _chain_float(h, 0j, k)
    if rho is None:  # pragma: no cover - the cycle of 0 under h avoids poles
        raise NonConvergence("cycle through infinity meets a pole")
    return rho


@dataclass
class FixedPoints:
    affine: np.ndarray
    infinity: bool
    iterations: int

    def count(self) -> int:
        return self.affine.shape[0] + int(self.infinity)

    def as_array(self) -> np.ndarray:
        if self.infinity:
            return np.concatenate([self.affine, [complex(np.inf, 0)]])
        return self.affine


def fixed_points_numeric(f: RationalMap, n: int, tol: float = 1e-14) -> FixedPoints:
    """Numeric Fix(f^n) without forming f^n: Aberth on the iterated map itself."""
    if n < 1:
        raise InvalidInput("period must be >= 1")
    total = f.degree ** n + 1
    k = _infinity_period(f, n)
    inf_fixed = False
    if k is not None:
        rho = _infinity_multiplier(f, k) ** (n // k)
        if abs(rho - 1) < 1e-9:
            raise InvalidInput("infinity is a parabolic fixed point of f^n; multiplicity unresolved")
        inf_fixed = True
    N = total - int(inf_fixed)
    Pc, Qc = _float_coeffs(f)
    ang = 2 * np.pi * (np.arange(N) + 0.25) / N
    radius = 1.0 + 0.5 * float(np.max(np.abs(Pc[:-1]) / max(abs(Pc[-1]), 1.0))) if f.is_polynomial() else 1.0
    z0 = radius * np.exp(1j * ang)
    z, it, ok = kernels.aberth_fixed_points(Pc.astype(np.complex128), Qc.astype(np.complex128),
                                            f.degree, n, z0, _FIX_MAXITER, tol)
    if not ok or not np.all(np.isfinite(z)):
        raise NonConvergence(f"Aberth iteration for Fix(f^{n}) did not settle in {_FIX_MAXITER} steps")
    return FixedPoints(z, inf_fixed, int(it))


@dataclass
class EquidistResult:
    gap: float
    fix_average: float
    mc_average: float
    fix_count: int
    period: int
    test_fn: str
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {"gap": _num(self.gap), "fix_average": _num(self.fix_average),
                "mc_average": _num(self.mc_average), "fix_count": self.fix_count,
                "period": self.period, "test_fn": self.test_fn,
                "samples": self.samples, "seed": self.seed}


def equidist_gap(f: RationalMap, n: int, test_fn_id: str, samples: int, seed: int,
                 burn_in: int = DEFAULT_BURN_IN) -> EquidistResult:
    """|mean of g over Fix(f^n) - Monte-Carlo mean of g against mu_f|."""
    g = test_function(test_fn_id)
    fix = fixed_points_numeric(f, n)
    fx, fy = to_homogeneous(fix.as_array())
    fix_avg = float(np.mean(g(*_sphere(fx, fy))))
    pts = sample_measure(f, samples, burn_in, seed)
    mx, my = to_homogeneous(pts)
    mc_avg = float(np.mean(g(*_sphere(mx, my))))
    gap = abs(fix_avg - mc_avg)
    return EquidistResult(gap, fix_avg, mc_avg, fix.count(), n, test_fn_id, samples, seed)
