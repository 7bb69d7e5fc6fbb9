"""Prime enumeration helpers (deterministic Miller-Rabin below 3.3e24)."""
from __future__ import annotations

from math import gcd, isqrt
from typing import Iterator

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int) -> list:
    """Primes p with lo <= p <= hi, ascending (sieve of Eratosthenes)."""
    if hi < 2 or hi < lo:
        return []
    lo = max(lo, 2)
    flags = bytearray([1]) * (hi + 1)
    flags[0:2] = b"\x00\x00"
    i = 2
    while i * i <= hi:
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
        i += 1
    return [p for p in range(lo, hi + 1) if flags[p]]


_SMALL = primes_in_range(2, 10000)


def descending_primes(start: int = (1 << 31) - 1) -> Iterator[int]:
    """Primes below start, largest first; used for multi-modular work."""
    n = start if start % 2 else start - 1
    while n > 2:
        if is_prime(n):
            yield n
        n -= 2


def _pollard_brent(n: int, seed: int, budget: int) -> int | None:
    # deterministic constants; returns a nontrivial factor or None
    y, c, m = seed % n, (2 * seed + 1) % n, 128
    g = r = q = 1
    x = ys = y
    spent = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += m
        r *= 2
        spent += r
        if spent > budget:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def factor_integer(n: int, rho_budget: int = 1 << 17) -> dict:
    """Factor |n| > 0 into {factor: exponent}.

    Factors are prime except for composite cofactors that resisted Pollard
    rho within the budget; callers that need primes should check is_prime.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict = {}
    for q in _SMALL:
        if q * q > n:
            break
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack.extend([r, r])
            continue
        g = None
        for seed in range(1, 3):
            g = _pollard_brent(m, seed, rho_budget)
            if g:
                break
        if not g:
            out[m] = out.get(m, 0) + 1
            continue
        stack.extend([g, m // g])
    return dict(sorted(out.items()))
