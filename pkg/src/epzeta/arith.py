"""Small exact-arithmetic helpers: primes, Kronecker symbol, discriminants."""

from __future__ import annotations

import math

import numpy as np


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def first_primes(n: int) -> list[int]:
    """The first n primes."""
    if n <= 0:
        return []
    # p_n < n (log n + log log n) for n >= 6
    bound = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 10
    ps = sieve_primes(bound)
    while len(ps) < n:
        bound *= 2
        ps = sieve_primes(bound)
    return [int(p) for p in ps[:n]]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for 64-bit range
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out 2s from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi symbol (a|n), n odd positive
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    """True for discriminants of quadratic orders that are maximal."""
    if d == 1 or d == 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        q = d // 4
        return q % 4 in (2, 3) and _squarefree(q)
    return False


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    """Solve a*x = b (mod m); return (x0, v) with solution set x0 + v*Z."""
    g, d, _ = xgcd(a, m)
    if b % g != 0:
        raise ValueError("no solution to linear congruence")
    v = m // g
    x0 = (b // g) * d % m
    return x0 % v, v


def prime_discriminant_factors(d: int) -> list[int]:
    """Factor a fundamental discriminant into prime discriminants.

    Every fundamental discriminant is uniquely a product of prime
    discriminants: -4, +-8, p* = (-1)^((p-1)/2) p for odd primes p.
    """
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    factors = []
    n = d
    if n % 4 == 0:
        q = n // 4
        if q % 2 == 0:
            # 2-part is +-8; pick the sign leaving an odd cofactor = 1 mod 4
            two_part = 8 if (n // 8) % 4 == 1 else -8
            factors.append(two_part)
            n //= two_part
        else:
            factors.append(-4)
            n //= -4
    m = abs(n)
    p = 3
    while p * p <= m:
        if m % p == 0:
            pstar = p if p % 4 == 1 else -p
            factors.append(pstar)
            m //= p
        else:
            p += 2
    if m > 1:
        factors.append(m if m % 4 == 1 else -m)
    prod = 1
    for f in factors:
        prod *= f
    assert prod == d, (d, factors)
    return sorted(factors)
