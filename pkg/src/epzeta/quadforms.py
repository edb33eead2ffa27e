"""Exact arithmetic of positive definite binary quadratic forms.

Reduction, class group enumeration with Gauss composition, the character
table of the class group, and per-prime splitting data.  Everything here is
integer (or root-of-unity) exact; the analytic modules consume these objects
read-only.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product

import numpy as np

from .arith import (
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    prime_discriminant_factors,
    sieve_primes,
    solve_linmod,
    xgcd,
)


@dataclass(frozen=True, order=True)
class QuadForm:
    """The form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.discriminant < 0

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> "QuadForm":
        """Representative of the inverse class (b negated)."""
        return QuadForm(self.a, -self.b, self.c)


class SplitType(Enum):
    RAMIFIED = "ramified"
    INERT = "inert"
    SPLIT = "split"


@dataclass(frozen=True)
class PrimeLocalData:
    p: int
    split_type: SplitType
    class_index: int | None  # inversion-orbit index; None for inert primes


@dataclass(frozen=True)
class ClassCharacter:
    """A character of the class group, stored as exact root-of-unity angles.

    values[k] = exp(2*pi*i*angles[k]) where angles[k] is a Fraction mod 1.
    """

    angles: tuple[Fraction, ...]
    values: tuple[complex, ...] = field(compare=False)
    is_real: bool

    @staticmethod
    def from_angles(angles: tuple[Fraction, ...]) -> "ClassCharacter":
        values = tuple(cmath.exp(2j * cmath.pi * float(a)) for a in angles)
        is_real = all(a.denominator <= 2 for a in angles)
        if is_real:
            values = tuple(1.0 + 0j if a == 0 else -1.0 + 0j for a in angles)
        return ClassCharacter(angles=angles, values=values, is_real=is_real)

    def __getitem__(self, k: int) -> complex:
        return self.values[k]

    def conjugate(self) -> "ClassCharacter":
        return ClassCharacter.from_angles(
            tuple((-a) % 1 for a in self.angles)
        )


@dataclass(frozen=True)
class ClassGroup:
    discriminant: int
    h: int
    w: int
    classes: tuple[QuadForm, ...]  # reduced representatives, principal first
    composition_table: tuple[tuple[int, ...], ...]
    structure: tuple[int, ...]  # cyclic factor orders, product = h
    # exponent coordinates of each class w.r.t. the cyclic factors
    _coords: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def identity(self) -> int:
        return 0

    def compose(self, i: int, j: int) -> int:
        return self.composition_table[i][j]

    def inverse_index(self, i: int) -> int:
        for j in range(self.h):
            if self.composition_table[i][j] == 0:
                return j
        raise RuntimeError("no inverse found; table is not a group table")

    def power(self, i: int, n: int) -> int:
        out = 0
        x = i
        n %= self.order_of(i)
        while n:
            if n & 1:
                out = self.composition_table[out][x]
            x = self.composition_table[x][x]
            n >>= 1
        return out

    def order_of(self, i: int) -> int:
        k, x = 1, i
        while x != 0:
            x = self.composition_table[x][i]
            k += 1
        return k

    def class_index_of(self, form: QuadForm) -> int:
        r = reduce_form(form)
        try:
            return self.classes.index(r)
        except ValueError:
            raise ValueError(
                f"form {form} has discriminant {form.discriminant}, "
                f"not in group of discriminant {self.discriminant}"
            ) from None


def reduce_form(form: QuadForm) -> QuadForm:
    """The unique reduced form equivalent to the input."""
    if not form.is_positive_definite:
        raise ValueError(f"form {form} is not positive definite")
    a, b, c = form.a, form.b, form.c
    while True:
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * r * a
            continue
        if b < 0 and -b == a:
            b = -b
            continue
        break
    out = QuadForm(a, b, c)
    assert out.is_reduced and out.discriminant == form.discriminant
    return out


def _compose_raw(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition of two primitive forms of equal discriminant."""
    if f.discriminant != g.discriminant:
        raise ValueError("composition requires equal discriminants")
    if (f.a, f.b, f.c) == (g.a, g.b, g.c):
        return _square_raw(f)
    a, b, c = f.a, f.b, f.c
    al, be, _ga = g.a, g.b, g.c
    gg = (b + be) // 2
    hh = -(b - be) // 2
    w = math.gcd(math.gcd(a, al), gg)
    j = w
    s = a // w
    t = al // w
    u = gg // w
    mu, nu = solve_linmod(t * u, hh * u + s * c, s * t)
    lam = solve_linmod(t * nu, hh - t * mu, s)[0]
    k = mu + nu * lam
    ell = (k * t - hh) // s
    m = (t * u * k - hh * u - c * s) // (s * t)
    A = s * t
    B = j * u - (k * t + ell * s)
    C = k * ell - j * m
    return QuadForm(A, B, C)


def _transform(f: QuadForm, x: int, z: int, y: int, w: int) -> QuadForm:
    """Apply the unimodular change of variables [[x, z], [y, w]]."""
    assert x * w - z * y == 1
    a2 = f(x, y)
    b2 = 2 * f.a * x * z + f.b * (x * w + z * y) + 2 * f.c * y * w
    c2 = f(z, w)
    out = QuadForm(a2, b2, c2)
    assert out.discriminant == f.discriminant
    return out


def _coprime_rep(f: QuadForm, m: int) -> QuadForm:
    """An equivalent form whose leading coefficient is coprime to m."""
    for y in range(0, 16):
        for x in range(-16, 17):
            if math.gcd(x, y) != 1:
                continue
            if math.gcd(f(x, y), m) == 1:
                _g, u, v = xgcd(x, y)
                return _transform(f, x, -v, y, u)
    raise RuntimeError(f"no representative of {f} coprime to {m}")


def _square_raw(f: QuadForm) -> QuadForm:
    # the duplication formula needs gcd(a, b) = 1; a coprime to the
    # discriminant forces that since gcd(a, b) divides D
    if math.gcd(f.a, f.b) != 1:
        f = _coprime_rep(f, 2 * abs(f.discriminant))
    a, b, c = f.a, f.b, f.c
    mu = solve_linmod(b, c, a)[0]
    A = a * a
    B = b - 2 * a * mu
    C = mu * mu - (b * mu - c) // a
    return QuadForm(A, B, C)


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced Gauss composition."""
    try:
        return reduce_form(_compose_raw(f, g))
    except ValueError:
        # retry with operands in general position (coprime leading coeffs)
        D = abs(f.discriminant)
        f2 = _coprime_rep(f, 2 * D)
        g2 = _coprime_rep(g, 2 * D * f2.a)
        return reduce_form(_compose_raw(f2, g2))


def principal_form(D: int) -> QuadForm:
    k = D % 2
    return QuadForm(1, k, (k * k - D) // 4)


def enumerate_reduced_forms(D: int) -> list[QuadForm]:
    """All primitive reduced forms of discriminant D < 0, principal first."""
    forms = []
    amax = math.isqrt(abs(D) // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
    p0 = principal_form(D)
    forms.sort(key=lambda f: (f != p0, f.a, f.b, f.c))
    assert forms and forms[0] == p0
    return forms


def _abelian_basis(table: list[list[int]]) -> list[tuple[int, int]]:
    """Direct-product basis [(generator, order), ...] from a group table.

    Greedy: repeatedly pick the coset of maximal order in G/H and fix the
    lift so its order equals the coset order.
    """
    h = len(table)
    basis: list[tuple[int, int]] = []
    subgroup = {0}

    def closure(base: set[int], g: int, order: int) -> set[int]:
        out = set()
        for x in base:
            y = x
            for _ in range(order):
                out.add(y)
                y = table[y][g]
        return out

    def coset_order(g: int, H: set[int]) -> int:
        k, x = 1, g
        while x not in H:
            x = table[x][g]
            k += 1
        return k

    def power(g: int, n: int) -> int:
        out = 0
        for _ in range(n):
            out = table[out][g]
        return out

    while len(subgroup) < h:
        cands = [g for g in range(h) if g not in subgroup]
        k, g = max((coset_order(g, subgroup), g) for g in cands)
        # g^k lies in H; write it in terms of the current basis and divide
        # through so the adjusted lift has exact order k.
        gk = power(g, k)
        if gk != 0:
            for exps in product(*(range(o) for (_b, o) in basis)):
                x = 0
                for (bg, _o), e in zip(basis, exps):
                    x = table[x][power(bg, e)]
                if x == gk:
                    break
            else:
                raise RuntimeError("basis closure failure")
            for (bg, o), e in zip(basis, exps):
                if e % k:
                    raise RuntimeError("non-divisible relation in basis build")
                g = table[g][power(bg, (o - e // k) % o)]
        basis.append((g, k))
        subgroup = closure(subgroup, g, k)
    basis.sort(key=lambda t: -t[1])
    return basis


def build_class_group(D: int) -> ClassGroup:
    """Class group of the fundamental discriminant D < 0."""
    if D >= 0:
        raise ValueError("discriminant must be negative")
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    classes = enumerate_reduced_forms(D)
    h = len(classes)
    index = {f: i for i, f in enumerate(classes)}
    table = [[index[compose(f, g)] for g in classes] for f in classes]
    for i in range(h):
        if sorted(table[i]) != list(range(h)) or sorted(
            row[i] for row in table
        ) != list(range(h)):
            raise RuntimeError("composition table is not a Latin square")
    if h == 1:
        basis: list[tuple[int, int]] = []
    else:
        basis = _abelian_basis(table)
    structure = tuple(o for (_g, o) in basis) if basis else (1,)
    # coordinates of every class in the basis
    coords_map: dict[int, tuple[int, ...]] = {}
    orders = [o for (_g, o) in basis]
    for exps in product(*(range(o) for o in orders)) if basis else [()]:
        x = 0
        for (bg, _o), e in zip(basis, exps):
            y = 0
            for _ in range(e):
                y = table[y][bg]
            x = table[x][y]
        if x in coords_map:
            raise RuntimeError("abelian basis is not a direct decomposition")
        coords_map[x] = exps
    coords = tuple(coords_map[i] for i in range(h))
    w = {-3: 6, -4: 4}.get(D, 2)
    return ClassGroup(
        discriminant=D,
        h=h,
        w=w,
        classes=tuple(classes),
        composition_table=tuple(tuple(r) for r in table),
        structure=structure,
        _coords=coords,
    )


def characters(group: ClassGroup) -> list[ClassCharacter]:
    """All h characters of the class group; the principal character first."""
    orders = group.structure if group.h > 1 else ()
    chars = []
    for ks in product(*(range(o) for o in orders)) if orders else [()]:
        angles = []
        for coord in group._coords:
            ang = Fraction(0)
            for k, e, o in zip(ks, coord, orders):
                ang += Fraction(k * e, o)
            angles.append(ang % 1)
        chars.append(ClassCharacter.from_angles(tuple(angles)))
    chars.sort(key=lambda ch: (any(a != 0 for a in ch.angles), ch.angles))
    return chars


def classify_prime(group: ClassGroup, p: int) -> PrimeLocalData:
    """Splitting type of p and the (inversion-orbit) class of a prime above it.

    The class index is found by brute-force representation search: a split or
    ramified prime p is represented by exactly the forms of the class of a
    prime ideal above p and its inverse.  Only the inversion orbit is well
    defined; we store the smaller of the two indices.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    D = group.discriminant
    sym = kronecker(D, p)
    if p != 2 and D % p == 0:
        sym = 0
    if sym == -1:
        return PrimeLocalData(p=p, split_type=SplitType.INERT, class_index=None)
    split_type = SplitType.RAMIFIED if sym == 0 else SplitType.SPLIT
    idx = _representing_class(group, p)
    if idx is None:
        raise RuntimeError(f"no reduced form of D={D} represents p={p}")
    inv = group.inverse_index(idx)
    cidx = min(idx, inv)
    if split_type is SplitType.RAMIFIED and group.power(cidx, 2) != 0:
        raise RuntimeError("ramified prime class has order > 2")
    return PrimeLocalData(p=p, split_type=split_type, class_index=cidx)


def _representing_class(group: ClassGroup, m: int) -> int | None:
    for i, f in enumerate(group.classes):
        if _represents(f, m):
            return i
    return None


def _represents(f: QuadForm, m: int) -> bool:
    # a x^2 + b x y + c y^2 = m  =>  (2ax + by)^2 + |D| y^2 = 4am
    D = abs(f.discriminant)
    ymax = math.isqrt(4 * f.a * m // D)
    for y in range(ymax + 1):
        rhs = 4 * f.a * m - D * y * y
        r = math.isqrt(rhs)
        if r * r != rhs:
            continue
        for sr in {r, -r}:
            for sy in {y, -y}:
                if (sr - f.b * sy) % (2 * f.a) == 0:
                    return True
    return False


@dataclass(frozen=True)
class EpsteinCoefficients:
    """The real weights a_j and character representatives in E = sum a_j L."""

    a_list: tuple[float, ...]
    chars: tuple[ClassCharacter, ...]

    @property
    def J(self) -> int:
        return len(self.a_list)


def epstein_coefficients(group: ClassGroup, Q: QuadForm) -> EpsteinCoefficients:
    """Pair conjugate characters and compute the decomposition weights.

    a_j = (w/h) chi_j(class of Q) for real chi_j and (2w/h) Re chi_j(class
    of Q) for a conjugate pair of complex characters.
    """
    if Q.discriminant != group.discriminant:
        raise ValueError("form has the wrong discriminant")
    cidx = group.class_index_of(Q)
    chars = characters(group)
    seen: set[tuple[Fraction, ...]] = set()
    a_list: list[float] = []
    reps: list[ClassCharacter] = []
    wh = group.w / group.h
    for ch in chars:
        if ch.angles in seen:
            continue
        seen.add(ch.angles)
        if ch.is_real:
            a_list.append(wh * ch.values[cidx].real)
            reps.append(ch)
        else:
            conj = ch.conjugate()
            seen.add(conj.angles)
            a_list.append(2 * wh * ch.values[cidx].real)
            reps.append(ch)
    return EpsteinCoefficients(a_list=tuple(a_list), chars=tuple(reps))


def genus_factorizations(D: int) -> list[tuple[int, int]]:
    """All splittings D = d1*d2 into fundamental discriminants, d1 <= d2.

    Each splitting realizes one real class-group character through Kronecker
    symbols: chi(class of a prime ideal over split p) = (d1|p) = (d2|p).
    """
    primes = prime_discriminant_factors(D)
    out = set()
    for mask in range(1 << len(primes)):
        d1 = d2 = 1
        for i, q in enumerate(primes):
            if mask >> i & 1:
                d1 *= q
            else:
                d2 *= q
        out.add((min(d1, d2), max(d1, d2)))
    return sorted(out)


def real_character_factorization(
    group: ClassGroup, char: ClassCharacter
) -> tuple[int, int]:
    """The (d1, d2) genus splitting realizing a real character.

    Matched by comparing Kronecker values with the character on split primes.
    """
    if not char.is_real:
        raise ValueError("only real characters factor through genus theory")
    D = group.discriminant
    probes = []
    p = 2
    while len(probes) < 8:
        if is_prime(p) and kronecker(D, p) == 1:
            probes.append(classify_prime(group, p))
        p += 1
    for d1, d2 in genus_factorizations(D):
        if all(
            kronecker(d1, pl.p) == round(char.values[pl.class_index].real)
            for pl in probes
        ):
            return d1, d2
    raise RuntimeError("no genus splitting matches the character")


def split_prime_class_counts(group: ClassGroup, limit: int) -> dict[int, int]:
    """Count split primes <= limit landing in each inversion class orbit.

    Exact and vectorized: values of every reduced form are enumerated over
    the lattice, so a split prime is attributed to the unique class orbit
    representing it.
    """
    D = group.discriminant
    ps = sieve_primes(limit)
    kro = np.array([kronecker(D, int(p)) for p in ps])
    split = ps[kro == 1]
    represented: dict[int, np.ndarray] = {}
    for i, f in enumerate(group.classes):
        orbit = min(i, group.inverse_index(i))
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
        if orbit in represented:
            represented[orbit] = np.union1d(represented[orbit], vals)
        else:
            represented[orbit] = vals
    counts = {}
    for orbit, vals in represented.items():
        counts[orbit] = int(np.isin(split, vals).sum())
    return counts


def group_to_json(group: ClassGroup) -> str:
    """JSON dump of the group and its character table (exact angles)."""
    chars = characters(group)
    payload = {
        "discriminant": group.discriminant,
        "h": group.h,
        "w": group.w,
        "classes": [[f.a, f.b, f.c] for f in group.classes],
        "composition_table": [list(r) for r in group.composition_table],
        "structure": list(group.structure),
        "characters": [
            {
                "angles": [[a.numerator, a.denominator] for a in ch.angles],
                "is_real": ch.is_real,
            }
            for ch in chars
        ],
    }
    return json.dumps(payload, indent=2)


def group_from_json(text: str) -> tuple[ClassGroup, list[ClassCharacter]]:
    payload = json.loads(text)
    group = build_class_group(payload["discriminant"])
    assert group.h == payload["h"]
    chars = [
        ClassCharacter.from_angles(
            tuple(Fraction(n, d) for n, d in entry["angles"])
        )
        for entry in payload["characters"]
    ]
    return group, chars
