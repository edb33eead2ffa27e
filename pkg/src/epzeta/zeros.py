"""Zero location and counting by the argument principle.

Winding numbers come from adaptive phase tracking along rectangle (or
circle) boundaries: the sample set is refined until every step changes
the phase by less than pi/2, which pins the total winding to an exact
integer.  Rectangles with winding > 1 are bisected, cells with winding 1
are handed to a Newton refiner, and refined zeros are certified by a
winding count on a small circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .epstein import EpsteinEvaluator
from .lfunc import LSeries
from .quadforms import build_class_group, epstein_coefficients

_PERTURB = 1e-4          # boundary-zero rectangle nudge
_MIN_STEP = 1e-9         # refinement floor before declaring a boundary zero
_DEDUP = 1e-6            # zeros closer than this are the same zero
_CERT_RADIUS = 1e-4      # certification circle radius
_MIN_SIDE = 1e-3         # stop subdividing below this side length


class BoundaryZero(RuntimeError):
    """|E| dipped below the certification floor on a contour."""


class NonConvergence(RuntimeError):
    """Newton iteration failed to reach the residual target."""


class MultipleZeroSuspected(RuntimeError):
    """Winding > 1 in the certification disk; carries the record."""

    def __init__(self, record):
        super().__init__(f"winding > 1 near {record.location}")
        self.record = record


@dataclass(frozen=True)
class Rectangle:
    sigma1: float
    sigma2: float
    t1: float
    t2: float

    def __post_init__(self):
        if not (self.sigma1 < self.sigma2 and self.t1 < self.t2):
            raise ValueError("degenerate rectangle")

    @property
    def center(self):
        return complex(0.5 * (self.sigma1 + self.sigma2), 0.5 * (self.t1 + self.t2))

    def contains(self, z, margin=0.0):
        return (
            self.sigma1 - margin <= z.real <= self.sigma2 + margin
            and self.t1 - margin <= z.imag <= self.t2 + margin
        )

    def halves(self, fraction=0.5):
        """Split the longer side at the given fraction; the two parts
        share the cut line exactly, so counts are additive."""
        if self.sigma2 - self.sigma1 >= self.t2 - self.t1:
            mid = self.sigma1 + fraction * (self.sigma2 - self.sigma1)
            return (
                Rectangle(self.sigma1, mid, self.t1, self.t2),
                Rectangle(mid, self.sigma2, self.t1, self.t2),
            )
        mid = self.t1 + fraction * (self.t2 - self.t1)
        return (
            Rectangle(self.sigma1, self.sigma2, self.t1, mid),
            Rectangle(self.sigma1, self.sigma2, mid, self.t2),
        )


@dataclass
class ZeroRecord:
    location: complex
    residual: float
    certified: bool
    refine_iters: int


@dataclass
class StripCount:
    rect: Rectangle
    winding_count: int
    zero_list: list = field(default_factory=list)
    boundary_min_modulus: float = math.inf


def _rect_loop(rect, step=0.05):
    """Counterclockwise boundary vertices, spacing <= step per edge."""
    corners = [
        complex(rect.sigma1, rect.t1),
        complex(rect.sigma2, rect.t1),
        complex(rect.sigma2, rect.t2),
        complex(rect.sigma1, rect.t2),
    ]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        n = max(1, math.ceil(abs(b - a) / step))
        pts.append(a + (b - a) * np.arange(n) / n)
    return np.concatenate(pts)


def _loop_winding(evaluator, z):
    """Exact winding of E along the closed polyline z (in order).

    Returns (winding, min |E| seen on the contour).  Refines until every
    step turns the phase by < pi/2; raises BoundaryZero when |E| falls
    under 10x the evaluator error bound or refinement stalls.
    """
    v = evaluator.values(z)
    minmod = _floor_check(evaluator, z, v, math.inf)
    for _ in range(60):
        vn = np.roll(v, -1)
        d = np.angle(vn / v)
        bad = np.abs(d) >= 0.5 * np.pi
        if not bad.any():
            total = float(d.sum()) / (2.0 * math.pi)
            k = round(total)
            if abs(total - k) > 0.25:
                raise BoundaryZero("phase sum far from integer")
            return k, minmod
        zn = np.roll(z, -1)
        if np.min(np.abs((zn - z)[bad])) < _MIN_STEP:
            raise BoundaryZero("refinement stalled at a boundary point")
        mids = 0.5 * (z[bad] + zn[bad])
        vm = evaluator.values(mids)
        minmod = _floor_check(evaluator, mids, vm, minmod)
        idx = np.nonzero(bad)[0] + 1
        z = np.insert(z, idx, mids)
        v = np.insert(v, idx, vm)
    raise BoundaryZero("phase tracking did not converge")


def _floor_check(evaluator, z, v, minmod):
    mods = np.abs(v)
    floor = 10.0 * np.asarray(evaluator.error_bound(z), dtype=float)
    if np.any(mods <= floor):
        raise BoundaryZero("contour modulus below certification floor")
    return min(minmod, float(mods.min()))


def winding_count(evaluator, rect, allow_pole=False):
    """Number of zeros of E inside rect by the argument principle."""
    if not allow_pole and rect.contains(1.0 + 0j):
        raise ValueError("rectangle contains the pole at s = 1")
    return _loop_winding(evaluator, _rect_loop(rect))[0]


def _circle_winding(evaluator, center, radius):
    th = np.linspace(0.0, 2.0 * math.pi, 17)[:-1]
    z = center + radius * np.exp(1j * th)
    return _loop_winding(evaluator, z)[0]


def refine_zero(evaluator, seed):
    """Newton from seed; certify by winding on a radius-1e-4 circle."""
    z = complex(seed)
    iters = 0
    for iters in range(1, 51):
        f = evaluator.value(z)
        if abs(f) < 1e-10:
            break
        df = evaluator.derivative(z)
        step = f / df
        if abs(step) > 0.5:
            step *= 0.5 / abs(step)
        z = z - step
        if abs(z - seed) > 10.0:
            raise NonConvergence(f"Newton escaped from seed {seed}")
    else:
        raise NonConvergence(f"no convergence from seed {seed}")
    residual = abs(evaluator.value(z))
    w = None
    for r in (_CERT_RADIUS, 1.3 * _CERT_RADIUS, 0.7 * _CERT_RADIUS):
        try:
            w = _circle_winding(evaluator, z, r)
            break
        except BoundaryZero:
            continue
    rec = ZeroRecord(z, residual, w == 1 and residual < 1e-9, iters)
    if w is not None and w > 1:
        raise MultipleZeroSuspected(rec)
    return rec


def _winding_with_retries(evaluator, rect, rng, retries=5):
    """Winding count with seeded +-1e-4 perturbation on boundary zeros."""
    r = rect
    for attempt in range(retries + 1):
        try:
            k, minmod = _loop_winding(evaluator, _rect_loop(r))
            return k, minmod, r
        except BoundaryZero:
            if attempt == retries:
                raise
            u = _PERTURB * rng.choice([-1.0, 1.0], size=4) * (attempt + 1)
            r = Rectangle(
                rect.sigma1 + u[0], rect.sigma2 + u[1],
                rect.t1 + u[2], rect.t2 + u[3],
            )
    raise BoundaryZero("unreachable")


def _split_counts(evaluator, cell, rng, retries=5):
    """Bisect cell on a shared cut line; retry the cut position when the
    line runs through a zero.  Outer edges are never moved, so
    wl + wr equals the cell's count exactly."""
    for attempt in range(retries + 1):
        f = 0.5 if attempt == 0 else float(rng.uniform(0.35, 0.65))
        left, right = cell.halves(f)
        try:
            wl = _loop_winding(evaluator, _rect_loop(left))[0]
            wr = _loop_winding(evaluator, _rect_loop(right))[0]
            return left, wl, right, wr
        except BoundaryZero:
            continue
    raise BoundaryZero(f"could not find a zero-free cut of {cell}")


def find_zeros(evaluator, rect, rng=None):
    """All zeros in rect: subdivision to winding <= 1, Newton, dedup.

    Returns (records, total_winding, boundary_min_modulus of the outer
    rectangle, rect actually used after boundary perturbation).
    """
    if rng is None:
        rng = np.random.default_rng(12345)
    total, minmod, rect = _winding_with_retries(evaluator, rect, rng)
    records = []
    stack = [(rect, total)]
    while stack:
        cell, w = stack.pop()
        if w == 0:
            continue
        small = (cell.sigma2 - cell.sigma1 < _MIN_SIDE
                 and cell.t2 - cell.t1 < _MIN_SIDE)
        if w == 1 or small:
            try:
                rec = refine_zero(evaluator, cell.center)
            except MultipleZeroSuspected as exc:
                rec = exc.record
            except NonConvergence:
                rec = None
            if rec is not None and (small or cell.contains(rec.location, 1e-9)):
                records.append(rec)
                continue
            if small:
                records.append(ZeroRecord(cell.center, math.nan, False, 50))
                continue
            # Newton wandered out of the cell: localize harder
        left, wl, right, wr = _split_counts(evaluator, cell, rng)
        stack.append((left, wl))
        stack.append((right, wr))
    return _dedup(records), total, minmod, rect


def _dedup(records):
    records = sorted(
        records, key=lambda r: (not r.certified, r.location.imag, r.location.real)
    )
    kept = []
    for rec in records:
        if all(abs(rec.location - k.location) > _DEDUP for k in kept):
            kept.append(rec)
    return sorted(kept, key=lambda r: (r.location.imag, r.location.real))


def count_strip(evaluator, sigma1, sigma2, T, window=5.0, rng=None):
    """Zeros of E in sigma1 < Re s < sigma2, 0 < Im s < T."""
    if not 0.5 < sigma1 < sigma2:
        raise ValueError("need 1/2 < sigma1 < sigma2")
    if T > 1e4:
        raise ValueError("T beyond desk scale")
    if rng is None:
        rng = np.random.default_rng(20260823)
    if T <= 0:
        return StripCount(Rectangle(sigma1, sigma2, -1.0, 0.0), 0, [], math.inf)
    rect = Rectangle(sigma1, sigma2, 0.0, T)
    total = 0
    minmod = math.inf
    records = []
    t = 0.0
    while t < T:
        top = min(t + window, T)
        recs, w, m, used = find_zeros(
            evaluator, Rectangle(sigma1, sigma2, t, top), rng
        )
        total += w
        minmod = min(minmod, m)
        records.extend(recs)
        # continue from the (possibly perturbed) top edge: no seam gap
        t = used.t2 if top < T else T
    return StripCount(rect, total, _dedup(records), minmod)


def scan_line(evaluator, sigma0, T, tol, rng=None):
    """Certified zeros with |Re rho - sigma0| < tol, 0 < Im rho < T."""
    if sigma0 <= 0.5:
        raise ValueError("need sigma0 > 1/2")
    if tol <= 0.0 or T <= 0.0:
        return []
    sc = count_strip(evaluator, sigma0 - tol, sigma0 + tol, T, rng=rng)
    return [
        r for r in sc.zero_list
        if r.certified and abs(r.location.real - sigma0) < tol
    ]


def find_near_period(Q, strip, eps, t_max, step=1e-2):
    """Near-periods t0 in (1, t_max] of E on the strip, to tolerance eps.

    Grid search over t0; the displacement |E(s + i t0) - E(s)| is
    maximized over a fixed 40-point sample of the strip.  Qualifying t0
    are thinned so consecutive returns differ by at least 1 (keeping the
    best t0 of each cluster).
    """
    sa, sb = strip
    if not 1.0 < sa < sb:
        raise ValueError("almost-periodicity needs sigma > 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    ev = EpsteinEvaluator(Q)
    sig = np.linspace(sa, sb, 8)
    tt = np.linspace(0.0, 2.0, 5)
    s0 = (sig[:, None] + 1j * tt[None, :]).ravel()
    base = ev.values(s0)
    t0s = np.arange(1.0 + step, t_max + step / 2, step)
    disp = np.empty(len(t0s))
    chunk = 500
    for i in range(0, len(t0s), chunk):
        tc = t0s[i : i + chunk]
        grid = s0[None, :] + 1j * tc[:, None]
        vals = ev.values(grid.ravel()).reshape(grid.shape)
        disp[i : i + chunk] = np.max(np.abs(vals - base[None, :]), axis=1)
    good = np.nonzero(disp < eps)[0]
    out = []
    i = 0
    while i < len(good):
        # keep the best qualifying t0 within each unit-length window
        j = np.searchsorted(t0s[good], t0s[good[i]] + 1.0)
        best = good[i:j][np.argmin(disp[good[i:j]])]
        out.append(float(t0s[best]))
        i = np.searchsorted(t0s[good], t0s[best] + 1.0)
    return out


def domination_abscissa(Q, M=4000):
    """Smallest sigma where the leading Dirichlet term dominates the rest.

    For sigma past this abscissa E(s, Q) cannot vanish:
    r(l) l^-sigma > sum_{m>l} |r(m)| m^-sigma with l the form minimum.
    The tail above M is bounded by w * (zeta(sigma)^2 - partial divisor
    sum), using |r(m)| <= w d(m).
    """
    group = build_class_group(Q.discriminant)
    co = epstein_coefficients(group, Q)
    r = np.zeros(M + 1)
    for aj, ch in zip(co.a_list, co.chars):
        r += aj * LSeries(group, ch).coefficients(M)
    lead = np.nonzero(r[1:])[0][0] + 1
    m = np.arange(1, M + 1, dtype=float)
    d = np.zeros(M + 1)
    for k in range(1, M + 1):
        d[k::k] += 1.0

    def margin(sigma):
        rest = np.sum(np.abs(r[lead + 1 :]) * m[lead:] ** -sigma)
        from scipy.special import zeta

        tail = group.w * (zeta(sigma) ** 2 - np.sum(d[1:] * m**-sigma))
        return r[lead] * lead**-sigma - rest - max(tail, 0.0)

    lo, hi = 1.01, 40.0
    if margin(hi) <= 0:
        raise RuntimeError("no domination abscissa below sigma = 40")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if margin(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def first_zero_right_of(evaluator, sigma1, T, window=5.0, sigma2=None, rng=None):
    """First certified zero with Re > sigma1, 0 < Im < T, or None.

    Walks height-`window` slabs upward and stops at the first hit, so a
    low-lying zero is found without paying for the full strip.
    """
    if rng is None:
        rng = np.random.default_rng(77)
    if sigma2 is None:
        sigma2 = domination_abscissa(evaluator.form)
    t = 0.0
    while t < T:
        top = min(t + window, T)
        recs, _w, _m, used = find_zeros(
            evaluator, Rectangle(sigma1, sigma2, t, top), rng
        )
        for rec in recs:
            if rec.certified:
                return rec
        t = used.t2 if top < T else T
    return None


def max_real_part(Q, T, sigma1=None):
    """Lower bound for sigma(Q) = sup Re of zeros: max Re over certified
    zeros with 0 < Im < T.  Returns -inf when none are found."""
    group = build_class_group(Q.discriminant)
    if group.h == 1:
        raise ValueError(
            "class number 1: E has an Euler product, out of scope"
        )
    ev = EpsteinEvaluator(Q, group)
    if sigma1 is None:
        sigma1 = 0.5 + 1e-3
    sc = count_strip(ev, sigma1, domination_abscissa(Q), T)
    best = -math.inf
    for rec in sc.zero_list:
        if rec.certified and 0.0 < rec.location.imag < T:
            best = max(best, rec.location.real)
    return best
