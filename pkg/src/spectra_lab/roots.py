"""Complex roots of exact integer polynomials.

Companion-matrix eigenvalues seed an Aberth-Ehrlich polish in double
precision. Coefficients of any size are handled by a power-of-two change of
variable chosen from the coefficient bit lengths, so nothing overflows. If the
double-precision residual check fails, mpmath redoes the job at twice the
precision, at most twice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import kernels
from .errors import InvalidInput, NonConvergence
from .exact_poly import IntPoly

DEFAULT_TOL = 1e-12
_MAXITER = 500


@dataclass
class ComplexRootSet:
    roots: list  # complex, one entry per root counted with multiplicity
    multiplicities: list  # cluster size estimate, aligned with roots
    max_residual: float
    precision: int = 53
    clustered: bool = False
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.roots)

    def distinct(self) -> list:
        """(root, multiplicity) with clusters collapsed to their centroid."""
        seen = []
        used = [False] * len(self.roots)
        for i, r in enumerate(self.roots):
            if used[i]:
                continue
            m = self.multiplicities[i]
            members = [j for j in range(i, len(self.roots))
                       if not used[j] and abs(self.roots[j] - r) <= _cluster_radius(r)]
            members = members[:m]
            for j in members:
                used[j] = True
            centroid = sum(self.roots[j] for j in members) / len(members)
            seen.append((complex(centroid), len(members)))
        return seen


def _cluster_radius(r) -> float:
    return 1e-5 * (1.0 + abs(r))


def _scaled_coeffs(a: IntPoly) -> tuple:
    """Float coefficients of 2^(-top) a(2^k x) with a power-of-two k.

    Returns (coeffs ascending complex128, k).
    """
    c = a.c
    n = len(c) - 1
    nz = [i for i, v in enumerate(c) if v]
    lo, hi = nz[0], n
    k = 0
    if hi > lo:
        # balance the outer coefficients: |a_lo| 2^(k lo) ~ |a_hi| 2^(k hi)
        k = round((abs(c[lo]).bit_length() - abs(c[hi]).bit_length()) / (hi - lo))
    logs = [(abs(v).bit_length() + k * i) if v else None for i, v in enumerate(c)]
    top = max(x for x in logs if x is not None)
    out = np.zeros(n + 1, np.complex128)
    for i, v in enumerate(c):
        if v:
            shift = k * i - top
            out[i] = _ldexp_int(v, shift)
    return out, k


def _ldexp_int(v: int, shift: int) -> float:
    # v * 2^shift as a float without overflowing on huge v
    b = abs(v).bit_length()
    if b > 60:
        v >>= (b - 60)
        shift += b - 60
    return math.ldexp(float(v), shift) if shift > -1100 else 0.0


def _residuals(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|a(z)| / sum |a_i| |z|^i; for |z| > 1 evaluated on the reversed
    polynomial at 1/z, which gives the same ratio without overflow."""
    out = np.empty(z.shape[0])
    big = np.abs(z) > 1
    for mask, c, pts in ((~big, coeffs, z[~big]), (big, coeffs[::-1], 1.0 / z[big])):
        pv = np.zeros_like(pts)
        scale = np.zeros(pts.shape[0])
        ap = np.abs(pts)
        for i in range(c.shape[0] - 1, -1, -1):
            pv = pv * pts + c[i]
            scale = scale * ap + abs(c[i])
        scale[scale == 0] = 1.0
        out[mask] = np.abs(pv) / scale
    return out


def _group(z: np.ndarray) -> list:
    mult = [1] * len(z)
    for i in range(len(z)):
        close = sum(1 for j in range(len(z)) if abs(z[j] - z[i]) <= _cluster_radius(z[i]))
        mult[i] = close
    return mult


def complex_roots(a, tol: float = DEFAULT_TOL, precision: int = 53) -> ComplexRootSet:
    """All complex roots of a (IntPoly) with relative residual <= tol."""
    if not isinstance(a, IntPoly):
        a = IntPoly(a)
    n = a.degree()
    if n < 1:
        raise InvalidInput("complex_roots needs degree >= 1")
    zeros = 0
    while a.c[zeros] == 0:
        zeros += 1
    body = IntPoly(a.c[zeros:])
    roots: list = [0j] * zeros
    resid = 0.0
    used_prec = precision
    if body.degree() >= 1:
        if precision <= 53:
            try:
                found, resid = _double_roots(body, tol)
            except NonConvergence as exc:
                found, resid, used_prec = _mp_roots(body, tol, 106, exc.residual)
        else:
            found, resid, used_prec = _mp_roots(body, tol, precision, float("nan"))
        roots.extend(found)
    roots.sort(key=lambda r: (round(r.real, 9), round(r.imag, 9)))
    z = np.array(roots, np.complex128)
    mult = _group(z)
    return ComplexRootSet(roots=[complex(r) for r in roots], multiplicities=mult,
                          max_residual=float(resid), precision=used_prec,
                          clustered=any(m > 1 for m in mult))


def _double_roots(a: IntPoly, tol: float) -> tuple:
    coeffs, k = _scaled_coeffs(a)
    n = coeffs.shape[0] - 1
    if n == 1:
        z = np.array([-coeffs[0] / coeffs[1]])
    elif n == 2:
        A, B, C = coeffs[2], coeffs[1], coeffs[0]
        disc = np.sqrt(B * B - 4 * A * C)
        q = -0.5 * (B + disc) if (np.conj(B) * disc).real >= 0 else -0.5 * (B - disc)
        z = np.array([q / A, C / q]) if q != 0 else np.zeros(2, complex)
    else:
        z0 = np.roots(coeffs[::-1]).astype(np.complex128)
        if not np.all(np.isfinite(z0)):
            z0 = np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)
        z, _, _ = kernels.aberth_poly(coeffs, z0, _MAXITER, 1e-16)
    res = _residuals(coeffs, z)
    worst = float(res.max()) if res.size else 0.0
    if not np.all(np.isfinite(z)) or worst > tol:
        raise NonConvergence("double-precision roots above tolerance", worst)
    scale = 2.0 ** k
    return [complex(v) * scale for v in z], worst


def _mp_roots(a: IntPoly, tol: float, prec: int, prev_resid: float) -> tuple:
    best = prev_resid
    for attempt in range(2):
        bits = prec * (2 ** attempt)
        with mpmath.workprec(bits):
            coeffs = [mpmath.mpf(v) for v in reversed(a.c)]
            try:
                rts = mpmath.polyroots(coeffs, maxsteps=200 + 20 * len(coeffs),
                                       extraprec=bits, error=False)
            except mpmath.libmp.libhyper.NoConvergence:
                continue
            worst = 0.0
            for r in rts:
                num = abs(mpmath.polyval(coeffs, r))
                den = mpmath.polyval([abs(c) for c in coeffs], abs(r)) or 1
                worst = max(worst, float(num / den))
            best = worst if (best != best or worst < best) else best
            if worst <= tol:
                return [complex(r) for r in rts], worst, bits
    raise NonConvergence("root finder did not converge after precision retries", best)
