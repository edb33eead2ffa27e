"""Integer helpers against brute-force oracles."""

import math

import numpy as np
import pytest

from epzeta.arith import (
    first_primes,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    prime_discriminant_factors,
    sieve_primes,
    solve_linmod,
    xgcd,
)


def test_sieve_matches_trial_division():
    ps = sieve_primes(1000)
    ref = [n for n in range(2, 1001) if all(n % d for d in range(2, n))]
    assert list(ps) == ref


def test_first_primes():
    assert first_primes(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(first_primes(2000)) == 2000


def test_is_prime():
    ps = set(map(int, sieve_primes(10000)))
    for n in range(10000):
        assert is_prime(n) == (n in ps)
    assert is_prime(2**61 - 1)
    assert not is_prime(2**62 - 1)


def test_kronecker_legendre_agreement():
    # against Euler's criterion for odd primes
    for p in map(int, sieve_primes(60)[1:]):
        for a in range(-30, 30):
            e = pow(a % p, (p - 1) // 2, p)
            ref = 0 if a % p == 0 else (1 if e == 1 else -1)
            assert kronecker(a, p) == ref


def test_kronecker_multiplicative():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a, b, n = (int(x) for x in rng.integers(-50, 50, size=3))
        assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


def test_fundamental_discriminants():
    known = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -31, -35, -39, -40]
    got = [d for d in range(-40, 0) if is_fundamental_discriminant(d)]
    assert sorted(got) == sorted(known)
    assert is_fundamental_discriminant(5)
    assert not is_fundamental_discriminant(-12)
    assert not is_fundamental_discriminant(1)


def test_xgcd():
    rng = np.random.default_rng(9)
    for _ in range(200):
        a, b = (int(x) for x in rng.integers(-1000, 1000, size=2))
        g, x, y = xgcd(a, b)
        assert g == math.gcd(a, b)
        assert a * x + b * y == g


def test_solve_linmod():
    rng = np.random.default_rng(13)
    for _ in range(300):
        a, b = (int(x) for x in rng.integers(-40, 40, size=2))
        m = int(rng.integers(1, 40))
        sols = [x for x in range(m) if (a * x - b) % m == 0]
        if not sols:
            with pytest.raises(ValueError):
                solve_linmod(a, b, m)
            continue
        x0, v = solve_linmod(a, b, m)
        assert sorted(x0 + k * v for k in range(m // v)) == sols


def test_prime_discriminant_factors():
    assert prime_discriminant_factors(-20) == [-4, 5]
    assert prime_discriminant_factors(-23) == [-23]
    assert prime_discriminant_factors(-4) == [-4]
    assert prime_discriminant_factors(-8) == [-8]
    assert prime_discriminant_factors(-24) == [-3, 8]
    assert prime_discriminant_factors(-40) == [-8, 5]
    for d in range(-500, 0):
        if not is_fundamental_discriminant(d):
            continue
        fs = prime_discriminant_factors(d)
        assert math.prod(fs) == d
        for f in fs:
            assert f in (-4, 8, -8) or is_fundamental_discriminant(f)
