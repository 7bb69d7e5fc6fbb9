"""numba-compiled hot loops.

Modular kernels work on int64 arrays with a prime p < 2^31, so every
product of two reduced residues fits in a signed 64-bit word.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_OPTS = dict(cache=True, nogil=True)


# -- arithmetic mod p ----------------------------------------------------------------

@njit(**_OPTS)
def _inv_mod(a, p):
    # Fermat; p prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


@njit(**_OPTS)
def _deg(a):
    for i in range(a.shape[0] - 1, -1, -1):
        if a[i] != 0:
            return i
    return -1


@njit(**_OPTS)
def poly_rem_mod(a, m, p):
    """a mod m over F_p for monic m; returns an array of length deg m."""
    N = m.shape[0] - 1
    r = a % p
    for i in range(r.shape[0] - 1, N - 1, -1):
        t = r[i]
        if t != 0:
            base = i - N
            for j in range(N + 1):
                r[base + j] = (r[base + j] - t * m[j]) % p
    out = np.zeros(N, np.int64)
    for i in range(min(N, r.shape[0])):
        out[i] = r[i]
    return out


@njit(**_OPTS)
def poly_mulmod(a, b, m, p):
    prod = np.zeros(a.shape[0] + b.shape[0] - 1, np.int64)
    for i in range(a.shape[0]):
        x = a[i]
        if x != 0:
            for j in range(b.shape[0]):
                prod[i + j] = (prod[i + j] + x * b[j]) % p
    return poly_rem_mod(prod, m, p)


@njit(**_OPTS)
def poly_invmod(b, m, p):
    """Inverse of b modulo monic m over F_p; (True, inv) or (False, zeros)."""
    N = m.shape[0] - 1
    r0 = m.copy() % p
    r1 = np.zeros(N + 1, np.int64)
    for i in range(min(b.shape[0], N + 1)):
        r1[i] = b[i] % p
    t0 = np.zeros(N + 1, np.int64)
    t1 = np.zeros(N + 1, np.int64)
    t1[0] = 1
    d0 = _deg(r0)
    d1 = _deg(r1)
    while d1 > 0:
        inv = _inv_mod(r1[d1], p)
        q = np.zeros(d0 - d1 + 1, np.int64)
        for i in range(d0 - d1, -1, -1):
            c = r0[i + d1] * inv % p
            q[i] = c
            if c != 0:
                for j in range(d1 + 1):
                    r0[i + j] = (r0[i + j] - c * r1[j]) % p
        # t0 - q * t1, truncated: degrees stay below N
        for i in range(q.shape[0]):
            c = q[i]
            if c != 0:
                for j in range(N + 1 - i):
                    if t1[j] != 0:
                        t0[i + j] = (t0[i + j] - c * t1[j]) % p
        r0, r1 = r1, r0
        t0, t1 = t1, t0
        d0 = d1
        d1 = _deg(r1)
    out = np.zeros(N, np.int64)
    if d1 < 0:
        return False, out
    inv = _inv_mod(r1[0], p)
    for i in range(N):
        out[i] = t1[i] * inv % p
    return True, out


@njit(**_OPTS)
def charpoly_mult_mod(m, r, p):
    """Characteristic polynomial of multiplication by r in F_p[z]/(m).

    m monic of degree N, r of length N. Returns N+1 ascending coefficients
    of the monic characteristic polynomial.
    """
    N = m.shape[0] - 1
    H = np.zeros((N, N), np.int64)
    col = r.copy() % p
    for j in range(N):
        for i in range(N):
            H[i, j] = col[i]
        # col <- z * col mod m
        top = col[N - 1]
        for i in range(N - 1, 0, -1):
            col[i] = (col[i - 1] - top * m[i]) % p
        col[0] = (-top * m[0]) % p
    # Hessenberg reduction by similarity transforms
    for k in range(1, N - 1):
        piv = k
        while piv < N and H[piv, k - 1] == 0:
            piv += 1
        if piv == N:
            continue
        if piv != k:
            for j in range(N):
                tmp = H[piv, j]
                H[piv, j] = H[k, j]
                H[k, j] = tmp
            for i in range(N):
                tmp = H[i, piv]
                H[i, piv] = H[i, k]
                H[i, k] = tmp
        inv = _inv_mod(H[k, k - 1], p)
        for i in range(k + 1, N):
            u = H[i, k - 1] * inv % p
            if u != 0:
                for j in range(N):
                    H[i, j] = (H[i, j] - u * H[k, j]) % p
                for j in range(N):
                    H[j, k] = (H[j, k] + u * H[j, i]) % p
    # charpoly recurrence on the Hessenberg form
    P = np.zeros((N + 1, N + 1), np.int64)
    P[0, 0] = 1
    for mm in range(1, N + 1):
        h = H[mm - 1, mm - 1]
        # (x - h) * P[mm-1]
        for j in range(mm, 0, -1):
            P[mm, j] = (P[mm - 1, j - 1] - h * P[mm - 1, j]) % p
        P[mm, 0] = (-h * P[mm - 1, 0]) % p
        t = 1
        for i in range(1, mm):
            t = t * H[mm - i, mm - i - 1] % p
            if t == 0:
                break
            c = H[mm - i - 1, mm - 1] * t % p
            if c != 0:
                for j in range(mm - i):
                    P[mm, j] = (P[mm, j] - c * P[mm - i - 1, j]) % p
    return P[N].copy()


# -- complex root finding ---------------------------------------------------------------

@njit(**_OPTS)
def _newton_ratio(coeffs, deg, x):
    """(value, p/p') at x; for |x| > 1 through the reversed polynomial at 1/x,
    which keeps high-degree evaluations from overflowing."""
    if abs(x) <= 1.0:
        pv = coeffs[deg]
        dv = 0j
        for k in range(deg - 1, -1, -1):
            dv = dv * x + pv
            pv = pv * x + coeffs[k]
        if dv == 0:
            return pv, 1e-3 + 0j
        return pv, pv / dv
    w = 1.0 / x
    rv = coeffs[0]
    dv = 0j
    for k in range(1, deg + 1):
        dv = dv * w + rv
        rv = rv * w + coeffs[k]
    den = deg * rv - w * dv
    if den == 0:
        return rv, 1e-3 + 0j
    return rv, x * rv / den


@njit(**_OPTS)
def aberth_poly(coeffs, z, maxiter, tol):
    """Aberth-Ehrlich iteration (Gauss-Seidel order) on explicit coefficients.

    coeffs ascending complex128; z initial guesses (modified copy returned).
    Returns (roots, iterations, converged).
    """
    z = z.copy()
    n = z.shape[0]
    deg = coeffs.shape[0] - 1
    done = np.zeros(n, np.bool_)
    it = 0
    for it in range(1, maxiter + 1):
        moved = False
        for i in range(n):
            if done[i]:
                continue
            x = z[i]
            pv, ratio = _newton_ratio(coeffs, deg, x)
            if pv == 0:
                done[i] = True
                continue
            s = 0j
            for j in range(n):
                if j != i:
                    diff = x - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            w = ratio / (1.0 - ratio * s)
            z[i] = x - w
            if abs(w) <= tol * (1.0 + abs(z[i])):
                done[i] = True
            else:
                moved = True
        if not moved:
            return z, it, True
    return z, it, False


@njit(**_OPTS)
def _map_ratio(Pc, Qc, d, n, x0):
    # h(z) = X_n(z) - z Y_n(z) for (X_n, Y_n) = F^n(z, 1); returns h / h'
    x = x0
    y = 1.0 + 0j
    dx = 1.0 + 0j
    dy = 0j
    for _ in range(n):
        px = 0j
        py = 0j
        pv = 0j
        qx = 0j
        qy = 0j
        qv = 0j
        # monomials x^i y^(d-i)
        for i in range(d + 1):
            xi = x ** i if i > 0 else 1.0 + 0j
            yi = y ** (d - i) if d - i > 0 else 1.0 + 0j
            mono = xi * yi
            pv += Pc[i] * mono
            qv += Qc[i] * mono
            if i > 0:
                dmx = i * (x ** (i - 1) if i > 1 else 1.0 + 0j) * yi
                px += Pc[i] * dmx
                qx += Qc[i] * dmx
            if d - i > 0:
                dmy = (d - i) * xi * (y ** (d - i - 1) if d - i > 1 else 1.0 + 0j)
                py += Pc[i] * dmy
                qy += Qc[i] * dmy
        ndx = px * dx + py * dy
        ndy = qx * dx + qy * dy
        s = max(abs(pv), abs(qv))
        if s == 0:
            s = 1.0
        x = pv / s
        y = qv / s
        dx = ndx / s
        dy = ndy / s
    h = x - x0 * y
    dh = dx - y - x0 * dy
    return h, dh


@njit(**_OPTS)
def aberth_fixed_points(Pc, Qc, d, n, z, maxiter, tol):
    """Aberth iteration for the affine fixed points of F^n, F = (P, Q) homogeneous.

    Pc, Qc: complex coefficient arrays of length d+1 (coefficient of x^i y^(d-i)).
    The number of initial guesses must equal the number of affine fixed points.
    """
    z = z.copy()
    N = z.shape[0]
    done = np.zeros(N, np.bool_)
    it = 0
    for it in range(1, maxiter + 1):
        moved = False
        for i in range(N):
            if done[i]:
                continue
            x = z[i]
            h, dh = _map_ratio(Pc, Qc, d, n, x)
            if h == 0:
                done[i] = True
                continue
            ratio = h / dh if dh != 0 else 1e-3 + 0j
            s = 0j
            for j in range(N):
                if j != i:
                    diff = x - z[j]
                    if diff != 0:
                        s += 1.0 / diff
            w = ratio / (1.0 - ratio * s)
            z[i] = x - w
            if abs(w) <= tol * (1.0 + abs(z[i])):
                done[i] = True
            else:
                moved = True
        if not moved:
            return z, it, True
    return z, it, False


@njit(**_OPTS)
def _small_roots(a, out):
    # roots of the polynomial with ascending coefficients a (degree = len(out))
    deg = out.shape[0]
    if deg == 1:
        out[0] = -a[0] / a[1]
        return
    if deg == 2:
        A = a[2]
        B = a[1]
        C = a[0]
        disc = np.sqrt(B * B - 4.0 * A * C)
        # pick the sign that avoids cancellation
        if (B.conjugate() * disc).real >= 0:
            q = -0.5 * (B + disc)
        else:
            q = -0.5 * (B - disc)
        if q == 0:
            out[0] = 0j
            out[1] = 0j
        else:
            out[0] = q / A
            out[1] = C / q
        return
    # Aberth from a circle of Cauchy radius
    lead = a[deg]
    R = 0.0
    for k in range(deg):
        v = abs(a[k] / lead)
        if v > R:
            R = v
    R = 1.0 + R
    for k in range(deg):
        ang = 2.0 * np.pi * k / deg + 0.4
        out[k] = 0.5 * R * (np.cos(ang) + 1j * np.sin(ang))
    for _ in range(200):
        moved = False
        for i in range(deg):
            x = out[i]
            pv = a[deg]
            dv = 0j
            for k in range(deg - 1, -1, -1):
                dv = dv * x + pv
                pv = pv * x + a[k]
            if pv == 0:
                continue
            ratio = pv / dv if dv != 0 else 1e-3 + 0j
            s = 0j
            for j in range(deg):
                if j != i:
                    diff = x - out[j]
                    if diff != 0:
                        s += 1.0 / diff
            w = ratio / (1.0 - ratio * s)
            out[i] = x - w
            if abs(w) > 1e-15 * (1.0 + abs(out[i])):
                moved = True
        if not moved:
            break


@njit(**_OPTS)
def backward_orbit(Pc, Qc, d, z0, u):
    """Random backward orbit: z_{k+1} is preimage number floor(u_k * d) of z_k.

    Pc, Qc are real affine coefficient arrays of length d+1. Returns the
    orbit (length len(u)); complex(inf) stands for the point at infinity.
    """
    n = u.shape[0]
    out = np.empty(n, np.complex128)
    z = z0
    a = np.empty(d + 1, np.complex128)
    roots = np.empty(d, np.complex128)
    for step in range(n):
        if np.isinf(z.real):
            for i in range(d + 1):
                a[i] = Qc[i]
        else:
            for i in range(d + 1):
                a[i] = Pc[i] - z * Qc[i]
        deg = d
        scale = 0.0
        for i in range(d + 1):
            if abs(a[i]) > scale:
                scale = abs(a[i])
        while deg > 0 and abs(a[deg]) <= 1e-300 + 1e-14 * scale:
            deg -= 1
        k = int(u[step] * d)
        if k >= d:
            k = d - 1
        if k >= deg:
            # a preimage at infinity (degree drop)
            z = complex(np.inf, 0.0)
        else:
            sub = roots[:deg]
            _small_roots(a[: deg + 1], sub)
            z = sub[k]
        out[step] = z
    return out


# -- orbits over F_p -------------------------------------------------------------------------

@njit(**_OPTS)
def _apply_mod(Pc, Qc, d, x, p):
    # points 0..p-1 plus infinity encoded as p
    if x == p:
        num = Pc[d] % p
        den = Qc[d] % p
        if den == 0:
            return p
        return num * _inv_mod(den, p) % p
    num = 0
    den = 0
    for i in range(d, -1, -1):
        num = (num * x + Pc[i]) % p
        den = (den * x + Qc[i]) % p
    if den == 0:
        return p
    return num * _inv_mod(den, p) % p


@njit(**_OPTS)
def orbit_mod_p(Pc, Qc, d, start, p):
    """Brent cycle detection on P^1(F_p); returns (tail, cycle_len)."""
    power = 1
    lam = 1
    tortoise = start
    hare = _apply_mod(Pc, Qc, d, start, p)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = _apply_mod(Pc, Qc, d, hare, p)
        lam += 1
    tortoise = start
    hare = start
    for _ in range(lam):
        hare = _apply_mod(Pc, Qc, d, hare, p)
    mu = 0
    while tortoise != hare:
        tortoise = _apply_mod(Pc, Qc, d, tortoise, p)
        hare = _apply_mod(Pc, Qc, d, hare, p)
        mu += 1
    return mu, lam
