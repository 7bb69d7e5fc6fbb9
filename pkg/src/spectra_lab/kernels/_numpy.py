"""Pure numpy implementations of the kernels in :mod:`._numba`.

Same contracts, vectorized where the algorithm allows it. The Aberth
updates here are Jacobi-style (all points move at once), so iterates differ
from the compiled Gauss-Seidel loop while converging to the same roots.
"""
from __future__ import annotations

import cmath

import numpy as np

_CHUNK = 512


def _inv_mod(a, p):
    return pow(int(a) % p, p - 2, p)


def _deg(a):
    nz = np.flatnonzero(a)
    return int(nz[-1]) if nz.size else -1


def poly_rem_mod(a, m, p):
    N = m.shape[0] - 1
    r = np.asarray(a, dtype=np.int64) % p
    m = np.asarray(m, dtype=np.int64)
    for i in range(r.shape[0] - 1, N - 1, -1):
        t = r[i]
        if t:
            base = i - N
            r[base:i + 1] = (r[base:i + 1] - t * m) % p
    out = np.zeros(N, np.int64)
    k = min(N, r.shape[0])
    out[:k] = r[:k]
    return out


def _mul_mod_full(a, b, p):
    out = np.zeros(a.shape[0] + b.shape[0] - 1, np.int64)
    for i in np.flatnonzero(a):
        out[i:i + b.shape[0]] = (out[i:i + b.shape[0]] + a[i] * b) % p
    return out


def poly_mulmod(a, b, m, p):
    return poly_rem_mod(_mul_mod_full(np.asarray(a, np.int64), np.asarray(b, np.int64), p), m, p)


def poly_invmod(b, m, p):
    N = m.shape[0] - 1
    r0 = np.asarray(m, np.int64) % p
    r1 = np.zeros(N + 1, np.int64)
    k = min(len(b), N + 1)
    r1[:k] = np.asarray(b[:k], np.int64) % p
    t0 = np.zeros(N + 1, np.int64)
    t1 = np.zeros(N + 1, np.int64)
    t1[0] = 1
    d0, d1 = _deg(r0), _deg(r1)
    while d1 > 0:
        inv = _inv_mod(r1[d1], p)
        for i in range(d0 - d1, -1, -1):
            c = r0[i + d1] * inv % p
            if c:
                r0[i:i + d1 + 1] = (r0[i:i + d1 + 1] - c * r1[:d1 + 1]) % p
                t0[i:] = (t0[i:] - c * t1[:N + 1 - i]) % p
        r0, r1 = r1, r0
        t0, t1 = t1, t0
        d0, d1 = d1, _deg(r1)
    out = np.zeros(N, np.int64)
    if d1 < 0:
        return False, out
    inv = _inv_mod(r1[0], p)
    out[:] = t1[:N] * inv % p
    return True, out


def charpoly_mult_mod(m, r, p):
    m = np.asarray(m, np.int64)
    N = m.shape[0] - 1
    H = np.zeros((N, N), np.int64)
    col = np.asarray(r, np.int64) % p
    for j in range(N):
        H[:, j] = col
        top = col[N - 1]
        shifted = np.empty_like(col)
        shifted[1:] = col[:-1]
        shifted[0] = 0
        col = (shifted - top * m[:N]) % p
    for k in range(1, N - 1):
        nz = np.flatnonzero(H[k:, k - 1])
        if nz.size == 0:
            continue
        piv = k + int(nz[0])
        if piv != k:
            H[[piv, k], :] = H[[k, piv], :]
            H[:, [piv, k]] = H[:, [k, piv]]
        inv = _inv_mod(H[k, k - 1], p)
        u = H[k + 1:, k - 1] * inv % p
        rows = np.flatnonzero(u)
        if rows.size == 0:
            continue
        # row operations together, column operations one at a time (overflow)
        H[k + 1:, :] = (H[k + 1:, :] - (u[:, None] * H[k, :][None, :]) % p) % p
        for idx in rows:
            i = k + 1 + idx
            H[:, k] = (H[:, k] + u[idx] * H[:, i]) % p
    P = np.zeros((N + 1, N + 1), np.int64)
    P[0, 0] = 1
    for mm in range(1, N + 1):
        h = H[mm - 1, mm - 1]
        row = np.zeros(N + 1, np.int64)
        row[1:mm + 1] = P[mm - 1, :mm]
        row[:mm] = (row[:mm] - h * P[mm - 1, :mm]) % p
        t = 1
        for i in range(1, mm):
            t = t * H[mm - i, mm - i - 1] % p
            if t == 0:
                break
            c = H[mm - i - 1, mm - 1] * t % p
            if c:
                row[:mm - i] = (row[:mm - i] - c * P[mm - i - 1, :mm - i]) % p
        P[mm] = row % p
    return P[N].copy()


# -- complex root finding ----------------------------------------------------------------

def _aberth_sums(z, active):
    s = np.empty(active.size, np.complex128)
    for start in range(0, active.size, _CHUNK):
        idx = active[start:start + _CHUNK]
        diff = z[idx][:, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
        inv[~np.isfinite(inv)] = 0
        s[start:start + idx.size] = inv.sum(axis=1)
    return s


def _aberth_loop(ratio_fn, z, maxiter, tol):
    z = np.array(z, dtype=np.complex128)
    done = np.zeros(z.shape[0], bool)
    it = 0
    for it in range(1, maxiter + 1):
        active = np.flatnonzero(~done)
        if active.size == 0:
            return z, it, True
        h, dh = ratio_fn(z[active])
        zero = h == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dh != 0, h / dh, 1e-3)
        s = _aberth_sums(z, active)
        w = ratio / (1.0 - ratio * s)
        w[zero] = 0
        z[active] = z[active] - w
        done[active] = np.abs(w) <= tol * (1.0 + np.abs(z[active]))
    return z, it, bool(done.all())


def aberth_poly(coeffs, z, maxiter, tol):
    coeffs = np.asarray(coeffs, np.complex128)
    deg = coeffs.shape[0] - 1
    deriv = coeffs[1:] * np.arange(1, deg + 1)
    rev = coeffs[::-1].copy()
    rderiv = rev[1:] * np.arange(1, deg + 1)
    polyval = np.polynomial.polynomial.polyval

    def ratio_fn(x):
        # |x| > 1 goes through the reversed polynomial at 1/x (no overflow):
        # p/p' = x r(w) / (deg r(w) - w r'(w)), w = 1/x
        big = np.abs(x) > 1
        pv = np.empty_like(x)
        dv = np.empty_like(x)
        xs = x[~big]
        pv[~big] = polyval(xs, coeffs)
        dv[~big] = polyval(xs, deriv)
        xb = x[big]
        w = 1.0 / xb
        rv = polyval(w, rev)
        pv[big] = rv
        dv[big] = (deg * rv - w * polyval(w, rderiv)) / xb
        return pv, dv

    return _aberth_loop(ratio_fn, z, maxiter, tol)


def _map_values(Pc, Qc, d, n, x0):
    x = x0.astype(np.complex128)
    y = np.ones_like(x)
    dx = np.ones_like(x)
    dy = np.zeros_like(x)
    i = np.arange(d + 1)
    for _ in range(n):
        xp = x[:, None] ** i[None, :]
        yp = y[:, None] ** (d - i)[None, :]
        mono = xp * yp
        pv = mono @ Pc
        qv = mono @ Qc
        with np.errstate(invalid="ignore", divide="ignore"):
            dmx = np.where(i[None, :] > 0, i[None, :] * x[:, None] ** np.maximum(i - 1, 0)[None, :] * yp, 0)
            dmy = np.where((d - i)[None, :] > 0,
                           (d - i)[None, :] * xp * y[:, None] ** np.maximum(d - i - 1, 0)[None, :], 0)
        ndx = (dmx @ Pc) * dx + (dmy @ Pc) * dy
        ndy = (dmx @ Qc) * dx + (dmy @ Qc) * dy
        s = np.maximum(np.abs(pv), np.abs(qv))
        s[s == 0] = 1.0
        x, y, dx, dy = pv / s, qv / s, ndx / s, ndy / s
    return x - x0 * y, dx - y - x0 * dy


def aberth_fixed_points(Pc, Qc, d, n, z, maxiter, tol):
    Pc = np.asarray(Pc, np.complex128)
    Qc = np.asarray(Qc, np.complex128)
    return _aberth_loop(lambda x: _map_values(Pc, Qc, d, n, x), z, maxiter, tol)


def backward_orbit(Pc, Qc, d, z0, u):
    Pc = np.asarray(Pc, np.float64)
    Qc = np.asarray(Qc, np.float64)
    out = np.empty(u.shape[0], np.complex128)
    z = complex(z0)
    for step, uk in enumerate(u):
        if cmath.isinf(z):
            a = Qc.astype(np.complex128)
        else:
            a = Pc - z * Qc
        scale = np.abs(a).max()
        deg = d
        while deg > 0 and abs(a[deg]) <= 1e-300 + 1e-14 * scale:
            deg -= 1
        k = min(int(uk * d), d - 1)
        if k >= deg:
            z = complex(np.inf, 0.0)
        elif deg == 1:
            z = -a[0] / a[1]
        elif deg == 2:
            A, B, C = a[2], a[1], a[0]
            disc = cmath.sqrt(B * B - 4 * A * C)
            q = -0.5 * (B + disc) if (B.conjugate() * disc).real >= 0 else -0.5 * (B - disc)
            roots = (q / A, C / q) if q != 0 else (0j, 0j)
            z = roots[k]
        else:
            z = np.roots(a[: deg + 1][::-1])[k]
        out[step] = z
    return out


def _apply_mod(Pc, Qc, d, x, p):
    if x == p:
        den = Qc[d] % p
        return p if den == 0 else Pc[d] * pow(den, -1, p) % p
    num = den = 0
    for i in range(d, -1, -1):
        num = (num * x + Pc[i]) % p
        den = (den * x + Qc[i]) % p
    return p if den == 0 else num * pow(den, -1, p) % p


def orbit_mod_p(Pc, Qc, d, start, p):
    Pc = [int(v) for v in Pc]
    Qc = [int(v) for v in Qc]
    step = lambda v: _apply_mod(Pc, Qc, d, v, p)  # noqa: E731
    power = lam = 1
    tortoise, hare = start, step(start)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
    tortoise = hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise, hare = step(tortoise), step(hare)
        mu += 1
    return mu, lam
