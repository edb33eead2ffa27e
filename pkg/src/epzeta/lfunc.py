"""Hecke L-functions of class-group characters.

Dirichlet coefficients b_m come multiplicatively out of the per-prime
splitting data; full values L(s, chi) come from character orthogonality
against the fast Epstein evaluators, L = (1/w) sum_C chi(C) E(s, Q_C),
which reuses the one certified evaluator per class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import first_primes, kronecker, sieve_primes
from .epstein import EpsteinEvaluator
from .quadforms import (
    ClassCharacter,
    ClassGroup,
    QuadForm,
    SplitType,
    classify_prime,
)


def rep_count_oracle(Q, m):
    """Exact #{(x,y): Q(x,y) = m} by bounded search."""
    if m < 1:
        raise ValueError("m must be positive")
    D = abs(Q.discriminant)
    count = 0
    ymax = math.isqrt(4 * Q.a * m // D)
    for y in range(-ymax, ymax + 1):
        # a x^2 + (b y) x + (c y^2 - m) = 0
        disc = 4 * Q.a * m - D * y * y
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for pm in ({r, -r} if r else {0}):
            if (pm - Q.b * y) % (2 * Q.a) == 0:
                count += 1
    return count


def split_prime_orbits(group, limit):
    """Map split prime p <= limit -> inversion-orbit class index.

    Vectorized: enumerate the values of each reduced form once, then test
    membership of the split primes.
    """
    D = group.discriminant
    ps = sieve_primes(limit)
    kro = np.array([kronecker(D, int(p)) for p in ps])
    split = ps[kro == 1]
    orbit_of = {}
    assigned = np.zeros(len(split), dtype=bool)
    seen = set()
    for i, f in enumerate(group.classes):
        orbit = min(i, group.inverse_index(i))
        if orbit in seen:
            continue
        seen.add(orbit)
        xmax = math.isqrt(4 * f.c * limit // abs(D)) + 1
        ymax = math.isqrt(4 * f.a * limit // abs(D)) + 1
        xs = np.arange(-xmax, xmax + 1, dtype=np.int64)
        ys = np.arange(0, ymax + 1, dtype=np.int64)
        vals = (
            f.a * xs[:, None] ** 2
            + f.b * xs[:, None] * ys[None, :]
            + f.c * ys[None, :] ** 2
        ).ravel()
        vals = np.unique(vals[(vals > 0) & (vals <= limit)])
        hit = np.isin(split, vals) & ~assigned
        assigned |= hit
        for p in split[hit]:
            orbit_of[int(p)] = orbit
    assert assigned.all()
    return orbit_of


@dataclass
class LSeries:
    """A Hecke L-function: character plus multiplicative coefficients."""

    group: ClassGroup
    character: ClassCharacter
    b: np.ndarray = field(default=None, repr=False)  # b[0]=0, b[1]=1, ...

    def coefficients(self, M):
        """b_1..b_M, multiplicative, from the three Euler factor shapes."""
        if self.b is not None and len(self.b) > M:
            return self.b[: M + 1]
        D = self.group.discriminant
        b = np.zeros(M + 1)
        b[1] = 1.0
        spf = _smallest_prime_factor(M)
        orbits = split_prime_orbits(self.group, M)
        chi = self.character
        for p in map(int, sieve_primes(M)):
            sym = kronecker(D, p)
            if sym == -1:
                bp1 = 0.0  # b_{p^k} = [k even]
            elif sym == 0:
                pl = classify_prime(self.group, p)
                bp1 = chi.values[pl.class_index].real  # +-1 (order <= 2)
            else:
                bp1 = 2.0 * chi.values[orbits[p]].real
            # fill prime powers
            pk, prev, cur = p, 1.0, bp1
            while pk <= M:
                b[pk] = cur
                pk *= p
                if sym == -1:
                    prev, cur = cur, prev  # 1,0,1,0,...
                elif sym == 0:
                    prev, cur = cur, cur * bp1
                else:
                    prev, cur = cur, bp1 * cur - prev
        # multiplicative extension via smallest prime factors
        for m in range(2, M + 1):
            p = spf[m]
            pk, r = p, m // p
            while r % p == 0:
                pk *= p
                r //= p
            if r > 1:
                b[m] = b[pk] * b[r]
        self.b = b
        return b

    def dirichlet_sum(self, s, M):
        """Truncated Dirichlet series sum_{m<=M} b_m m^-s (oracle use)."""
        b = self.coefficients(M)
        m = np.arange(1, M + 1)
        return complex(np.sum(b[1:] * m ** (-complex(s))))


def _smallest_prime_factor(M):
    spf = np.zeros(M + 1, dtype=np.int64)
    for p in range(2, M + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


class HeckeFamily:
    """Shared evaluators for all classes of one discriminant."""

    def __init__(self, group):
        self.group = group
        self.evaluators = [EpsteinEvaluator(f, group) for f in group.classes]

    def eval_L(self, char, s):
        """L(s, chi) = (1/w) sum_C chi(C) E(s, Q_C); vectorized over s."""
        s = np.asarray(s, dtype=complex)
        total = np.zeros_like(s)
        for i, ev in enumerate(self.evaluators):
            total = total + char.values[i] * ev.values(s)
        return total / self.group.w

    def eval_L_error(self, s):
        s = np.asarray(s, dtype=complex)
        return sum(ev.error_bound(s) for ev in self.evaluators) / self.group.w


@dataclass(frozen=True)
class TruncatedEuler:
    """L_n(s, chi): Euler product over the first n rational primes."""

    group: ClassGroup
    character: ClassCharacter
    n: int

    def local_factors(self):
        """[(p, kind, value)] with kind in {split, inert, ramified} and
        value = 2 Re chi(p-ideal) (split) or chi(p-ideal) (ramified)."""
        out = []
        if self.n == 0:
            return out
        ps = first_primes(self.n)
        orbits = split_prime_orbits(self.group, max(ps) + 1)
        for p in ps:
            sym = kronecker(self.group.discriminant, p)
            if sym == -1:
                out.append((p, SplitType.INERT, 0.0))
            elif sym == 0:
                pl = classify_prime(self.group, p)
                out.append(
                    (p, SplitType.RAMIFIED, self.character.values[pl.class_index].real)
                )
            else:
                out.append(
                    (p, SplitType.SPLIT, 2.0 * self.character.values[orbits[p]].real)
                )
        return out

    def eval(self, s):
        """Finite Euler product; vectorized over s (Re s > 0)."""
        s = np.asarray(s, dtype=complex)
        out = np.ones_like(s)
        for p, kind, v in self.local_factors():
            ps = np.exp(-s * math.log(p))
            if kind is SplitType.INERT:
                out = out / (1.0 - ps * ps)
            elif kind is SplitType.RAMIFIED:
                out = out / (1.0 - v * ps)
            else:
                out = out / (1.0 - v * ps + ps * ps)
        return out

    def log_eval(self, s):
        """log L_n(s) as a sum of principal logs of the factors."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for p, kind, v in self.local_factors():
            ps = np.exp(-s * math.log(p))
            if kind is SplitType.INERT:
                out = out - np.log(1.0 - ps * ps)
            elif kind is SplitType.RAMIFIED:
                out = out - np.log(1.0 - v * ps)
            else:
                out = out - np.log(1.0 - v * ps + ps * ps)
        return out


def eval_L(group, char, s):
    return HeckeFamily(group).eval_L(char, s)


def eval_truncated(trunc, s):
    return trunc.eval(s)


def decomposition_residual(group, Q, s):
    """|E(s, Q) - sum_j a_j L(s, chi_j)| at an array of s."""
    from .quadforms import epstein_coefficients

    fam = HeckeFamily(group)
    co = epstein_coefficients(group, Q)
    i = group.class_index_of(Q)
    s = np.asarray(s, dtype=complex)
    lhs = fam.evaluators[i].values(s)
    rhs = np.zeros_like(s)
    for aj, ch in zip(co.a_list, co.chars):
        rhs = rhs + aj * fam.eval_L(ch, s)
    return np.abs(lhs - rhs)


def check_mean_square_truncation(family, char, sigma, n, T, step=0.05):
    """(1/T) int_1^T |L(sigma+it) - L_n(sigma+it)|^2 dt.

    Trapezoid at the given step with a Richardson error estimate from a
    halved step.  Returns (value, error_estimate).
    """
    trunc = TruncatedEuler(family.group, char, n)

    def integral(h):
        t = np.arange(1.0, T + h / 2, h)
        s = sigma + 1j * t
        diff = family.eval_L(char, s) - trunc.eval(s)
        y = np.abs(diff) ** 2
        return np.trapezoid(y, t) / T

    coarse = integral(step)
    fine = integral(step / 2)
    return fine, abs(fine - coarse) / 3.0
