"""Time the numba kernels against the pure numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case runs once on both backends to warm up (and to JIT-compile), then
takes the best of --repeat timings. Outputs are compared so a fast but wrong
backend shows up as a mismatch rather than a win.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from spectra_lab.kernels import get_backend

P31 = 2147483629  # a prime below 2^31


def _charpoly_case(N):
    rng = np.random.default_rng(0)
    m = np.concatenate([rng.integers(0, P31, N), [1]]).astype(np.int64)
    r = rng.integers(0, P31, N).astype(np.int64)
    return (m, r, P31)


def _aberth_case(n):
    rng = np.random.default_rng(1)
    c = (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)).astype(np.complex128)
    z0 = np.roots(c[::-1]).astype(np.complex128) * (1 + 1e-6)
    return (c, z0, 500, 1e-15)


def _fixed_points_case(n):
    Pc = np.array([-0.1, 0.0, 1.0], np.complex128)
    Qc = np.array([1.0, 0.0, 0.0], np.complex128)  # Q = y^2
    N = 2 ** n
    z0 = 1.1 * np.exp(2j * np.pi * (np.arange(N) + 0.25) / N)
    return (Pc, Qc, 2, n, z0, 2000, 1e-14)


def _backward_case(samples):
    u = np.random.default_rng(2).random(samples)
    return (np.array([1.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]), 2, 0.3 + 0.7j, u)


def _orbit_case(p):
    return (np.array([1, 0, 1], np.int64), np.array([1, 0, 0], np.int64), 2, 3, p)


def cases(quick: bool) -> list:
    s = 1 if quick else 2
    return [
        ("charpoly_mult_mod", f"N={60 * s}", _charpoly_case(60 * s)),
        ("aberth_poly", f"deg={128 * s}", _aberth_case(128 * s)),
        ("aberth_fixed_points", f"z^2-0.1, n={7 + s}", _fixed_points_case(7 + s)),
        ("backward_orbit", f"{20000 * s} steps", _backward_case(20000 * s)),
        ("orbit_mod_p", "z^2+1, p=1000003", _orbit_case(1000003)),
    ]


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        if a.dtype.kind == "c":
            # root sets may come back in a different order: match nearest neighbours
            dist = np.abs(a[:, None] - b[None, :]).min(axis=1)
            return bool(np.all(dist <= 1e-10 * (1 + np.abs(a))))
        return np.array_equal(a, b)
    return a == b


def _best(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    nb, npb = get_backend("numba"), get_backend("numpy")
    print(f"{'kernel':<22}{'case':<22}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}  agree")
    for name, label, inp in cases(args.quick):
        f_nb, f_np = getattr(nb, name), getattr(npb, name)
        out_nb, out_np = f_nb(*inp), f_np(*inp)
        if name == "backward_orbit":
            agree = np.allclose(out_nb, out_np, rtol=1e-6)
        elif name.startswith("aberth"):
            agree = _same(out_nb[0], out_np[0])
        else:
            agree = _same(out_nb, out_np)
        t_nb = _best(f_nb, inp, args.repeat)
        t_np = _best(f_np, inp, args.repeat)
        print(f"{name:<22}{label:<22}{t_nb * 1e3:>11.2f}{t_np * 1e3:>11.2f}{t_np / t_nb:>8.1f}x  {agree}")


if __name__ == "__main__":
    main()
