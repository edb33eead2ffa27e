"""Jensen functions phi_f(sigma) and their mean-motion consequences.

phi_f(sigma) is the limiting time average of log|f(sigma + it)|.  Its
one-sided derivatives bound the relative frequency of zeros in vertical
strips (the classical Jensen / mean-motion circle of ideas), so the
numerical program is: estimate phi on a sigma grid, difference it, and
read zero densities and linearity intervals off the derivative profile.

Two estimators are provided: a singularity-aware time average along a
vertical line, and a quasi-Monte-Carlo torus average for truncations.
"""

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .quadforms import build_class_group, epstein_coefficients
from .lfunc import TruncatedEuler
from .randmodel import DensityTarget, TorusModel

_FLOOR = 1e-3  # |f| below this marks a near-zero of the integrand
_WINDOW = 1e-2  # excision window width around each near-zero
_MAX_EXCISED = 0.05  # fraction of the range allowed inside windows


@dataclass
class JensenProfile:
    """phi on a uniform sigma grid, with differenced derivatives."""

    sigma_grid: np.ndarray
    phi: np.ndarray
    phi_err: np.ndarray
    T_used: float
    dphi: np.ndarray | None = None
    dphi_err: np.ndarray | None = None
    d2phi: np.ndarray | None = None
    d2phi_err: np.ndarray | None = None
    d2_trusted: np.ndarray | None = None


@dataclass
class LinearityReport:
    """Maximal intervals where phi is affine within error."""

    intervals: list  # (sigma_lo, sigma_hi, slope)
    slope_match: list  # n with slope ~ -log n, or None, per interval


class TruncatedEpstein:
    """E_n(s) = sum_j a_j L_n(s, chi_j); the time-average side of the
    torus/time equivalence for truncations."""

    def __init__(self, Q, n, group=None):
        self.form = Q
        self.n = n
        self.group = group or build_class_group(Q.discriminant)
        co = epstein_coefficients(self.group, Q)
        self.a_list = list(co.a_list)
        self.truncs = [
            TruncatedEuler(self.group, ch, n) for ch in co.chars
        ]

    def values(self, s):
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for aj, tr in zip(self.a_list, self.truncs):
            out = out + aj * tr.eval(s)
        return out

    def value(self, s):
        return complex(self.values(np.atleast_1d(complex(s)))[0])

    def derivative(self, s):
        h = 1e-5
        s = complex(s)
        return (self.value(s + h) - self.value(s - h)) / (2 * h)


def _values_chunked(evaluator, s, chunk=1 << 15):
    s = np.asarray(s, dtype=complex)
    out = np.empty_like(s)
    for i in range(0, len(s), chunk):
        out[i : i + chunk] = evaluator.values(s[i : i + chunk])
    return out


def _newton_root(fun, z0, iters=30):
    """Small complex Newton with finite-difference derivative."""
    z = complex(z0)
    h = 1e-6
    for _ in range(iters):
        f = fun(z)
        df = (fun(z + h) - fun(z - h)) / (2 * h)
        if df == 0:
            break
        step = f / df
        if abs(step) > 0.5:
            step *= 0.5 / abs(step)
        z -= step
        if abs(step) < 1e-13:
            break
    return z


def _log_dist_integral(a, b, t1, t2):
    """int_{t1}^{t2} log|a + i(t - b)| dt, exactly."""

    def F(u):
        if a == 0.0:
            return u * (math.log(abs(u)) - 1.0) if u != 0.0 else 0.0
        return u * (0.5 * math.log(a * a + u * u) - 1.0) + a * math.atan(u / a)

    return F(t2 - b) - F(t1 - b)


def _find_windows(fun, sigma, t, absf):
    """Excision windows [(t1, t2, rho, log|f'(rho)|)] around near-zeros."""
    below = absf < _FLOOR
    if not np.any(below):
        return []
    windows = []
    idx = np.flatnonzero(below)
    splits = np.flatnonzero(np.diff(idx) > 1)
    for grp in np.split(idx, splits + 1):
        tc = t[grp[np.argmin(absf[grp])]]
        rho = _newton_root(fun, complex(sigma, tc))
        h = 1e-6
        fp = (fun(rho + h) - fun(rho - h)) / (2 * h)
        t1 = max(t[0], rho.imag - _WINDOW / 2)
        t2 = min(t[-1], rho.imag + _WINDOW / 2)
        if t2 > t1 and abs(fp) > 0:
            windows.append((t1, t2, rho, math.log(abs(fp))))
    # merge overlaps
    windows.sort()
    merged = []
    for w in windows:
        if merged and w[0] <= merged[-1][1]:
            prev = merged[-1]
            merged[-1] = (prev[0], max(prev[1], w[1]), prev[2], prev[3])
        else:
            merged.append(w)
    return merged


def jensen_time_average(evaluator, sigma, T, x=0.0, T0=1.0, step=0.02):
    """((1/(T-T0)) int_{T0}^T log|f(sigma+it) - x| dt, error estimate).

    Trapezoid with Richardson error, plus analytic integration of the
    log-singular model log|f'(rho)| + log|s - rho| inside a small window
    around each near-zero of f - x on the line.
    """
    x = complex(x)
    if T <= T0:
        raise ValueError("need T > T0")

    def fun(z):
        return evaluator.value(z) - x

    t_fine = np.arange(T0, T + step / 4, step / 2)
    f_fine = _values_chunked(evaluator, sigma + 1j * t_fine) - x
    absf = np.abs(f_fine)
    if np.any(absf == 0.0):
        raise ValueError("f - x vanishes exactly on the sample grid")
    windows = _find_windows(fun, sigma, t_fine, absf)
    excised = sum(t2 - t1 for t1, t2, _, _ in windows)
    if excised > _MAX_EXCISED * (T - T0):
        raise ValueError("too many near-zeros on the line for quadrature")

    def composite(t, logf):
        """Trapezoid outside the windows + analytic model inside."""
        total = 0.0
        pos = T0
        for t1, t2, rho, logfp in windows:
            if t1 > t[-1]:
                continue
            t2 = min(t2, float(t[-1]))
            sel = (t >= pos) & (t <= t1)
            if np.count_nonzero(sel) >= 2:
                total += np.trapezoid(logf[sel], t[sel])
            total += logfp * (t2 - t1) + _log_dist_integral(
                sigma - rho.real, rho.imag, t1, t2
            )
            pos = t2
        sel = t >= pos
        if np.count_nonzero(sel) >= 2:
            total += np.trapezoid(logf[sel], t[sel])
        return total

    fine = composite(t_fine, np.log(absf))
    t_co = t_fine[::2]
    coarse = composite(t_co, np.log(absf[::2]))
    # finite-T component: compare against the half-range average
    Th = T0 + (T - T0) / 2
    half_sel = t_fine <= Th
    half = composite(t_fine[half_sel], np.log(absf[half_sel]))
    tail = abs(fine / (T - T0) - half / (Th - T0))
    # model-mismatch contribution at the window edges
    mism = 0.0
    for t1, t2, rho, logfp in windows:
        for te in (t1, t2):
            fe = abs(fun(complex(sigma, te)))
            model = logfp + math.log(abs(complex(sigma, te) - rho))
            mism += 0.5 * abs(math.log(fe) - model) * (t2 - t1)
    err = (abs(fine - coarse) / 3.0 + mism) / (T - T0)
    return fine / (T - T0), err + tail + 1e-12


def jensen_torus(model, sigma=None, x=0.0, n_points=2**12, replicates=8,
                 seed=0, target=DensityTarget.E_AT_X):
    """QMC estimate of int_{[0,1]^n} log|E_{n,sigma}(theta) - x| dtheta.

    With target RATIO_AT_MINUS_A the integrand is log|L2/L1 - x| instead.
    Returns (estimate, standard error over scrambled replicates).
    """
    x = complex(x)
    if sigma is not None and sigma != model.sigma:
        model = TorusModel(model.form, model.n, sigma, model.group)
    if model.n > 12:
        raise ValueError("QMC dimension budget is n <= 12")
    if model.n == 0:
        if target is DensityTarget.E_AT_X:
            return math.log(abs(complex(np.sum(model.a_list)) - x)), 0.0
        return math.log(abs(1.0 - x)), 0.0
    means = []
    for r in range(replicates):
        eng = qmc.Sobol(d=model.n, scramble=True, seed=seed + r)
        theta = eng.random(n_points)
        if target is DensityTarget.E_AT_X:
            E, _, _ = model.sample(theta)
        else:
            E, _ = model.sample_ratio(theta)
        means.append(float(np.mean(np.log(np.abs(E - x)))))
    means = np.array(means)
    err = float(np.std(means) / math.sqrt(max(1, len(means) - 1)))
    return float(np.mean(means)), err


def derivative_profile(profile):
    """Fill dphi / d2phi by central differences with propagated errors."""
    g = np.asarray(profile.sigma_grid, dtype=float)
    if len(g) < 3:
        raise ValueError("need at least 3 grid points")
    h = g[1] - g[0]
    if not np.allclose(np.diff(g), h, rtol=0, atol=1e-9 * abs(h)):
        raise ValueError("grid spacing must be uniform")
    phi = np.asarray(profile.phi, dtype=float)
    e = np.asarray(profile.phi_err, dtype=float)
    n = len(g)
    dphi = np.full(n, np.nan)
    dphi_err = np.full(n, np.nan)
    d2 = np.full(n, np.nan)
    d2_err = np.full(n, np.nan)
    dphi[1:-1] = (phi[2:] - phi[:-2]) / (2 * h)
    dphi_err[1:-1] = np.hypot(e[2:], e[:-2]) / (2 * h)
    d2[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / h**2
    d2_err[1:-1] = np.sqrt(e[2:] ** 2 + 4 * e[1:-1] ** 2 + e[:-2] ** 2) / h**2
    trusted = h * h >= 10.0 * e  # second differences drown otherwise
    return dataclasses.replace(
        profile, dphi=dphi, dphi_err=dphi_err, d2phi=d2, d2phi_err=d2_err,
        d2_trusted=trusted,
    )


def jensen_profile(evaluator, sigma_lo, sigma_hi, T, x=0.0, spacing=0.05,
                   T0=1.0, step=0.02):
    """Time-average phi over a uniform grid, with derivatives filled."""
    m = int(round((sigma_hi - sigma_lo) / spacing))
    grid = sigma_lo + spacing * np.arange(m + 1)
    phi = np.empty(len(grid))
    err = np.empty(len(grid))
    for i, sg in enumerate(grid):
        phi[i], err[i] = jensen_time_average(
            evaluator, float(sg), T, x=x, T0=T0, step=step
        )
    return derivative_profile(
        JensenProfile(grid, phi, err, T_used=float(T))
    )


def zero_frequency(profile, sigma1, sigma2):
    """((dphi(sigma2) - dphi(sigma1)) / 2pi, error) — the strip density."""
    if profile.dphi is None:
        profile = derivative_profile(profile)
    g = np.asarray(profile.sigma_grid, dtype=float)
    h = g[1] - g[0]
    out = []
    for sg in (sigma1, sigma2):
        i = int(np.argmin(np.abs(g - sg)))
        if abs(g[i] - sg) > h / 2 + 1e-12 or i in (0, len(g) - 1):
            raise ValueError("sigma must be an interior grid point")
        out.append(i)
    i1, i2 = out
    val = (profile.dphi[i2] - profile.dphi[i1]) / (2 * math.pi)
    err = math.hypot(profile.dphi_err[i2], profile.dphi_err[i1]) / (2 * math.pi)
    return float(val), float(err)


def detect_linearity(profile, slope_tol=0.05, max_n=10**4):
    """Maximal runs with |d2phi| < 2 x error, length >= 3 grid points."""
    if profile.sigma_grid[0] <= 1.0:
        raise ValueError("linearity scan requires sigma > 1")
    if profile.d2phi is None:
        profile = derivative_profile(profile)
    g = np.asarray(profile.sigma_grid, dtype=float)
    flat = np.zeros(len(g), dtype=bool)
    inner = slice(1, len(g) - 1)
    flat[inner] = np.abs(profile.d2phi[inner]) < 2.0 * profile.d2phi_err[inner]
    intervals = []
    matches = []
    idx = np.flatnonzero(flat)
    if len(idx):
        splits = np.flatnonzero(np.diff(idx) > 1)
        for grp in np.split(idx, splits + 1):
            if len(grp) < 3:
                continue
            slope = float(np.mean(profile.dphi[grp]))
            intervals.append((float(g[grp[0]]), float(g[grp[-1]]), slope))
            best = min(range(1, max_n + 1), key=lambda n: abs(slope + math.log(n)))
            matches.append(
                best if abs(slope + math.log(best)) < slope_tol else None
            )
    return LinearityReport(intervals=intervals, slope_match=matches)


def convexity_margins(profile):
    """phi(i+1) + phi(i-1) - 2 phi(i) + 3 x combined error, per interior i.

    All entries nonnegative <=> the measured profile is convex within
    3x error bars.
    """
    phi = np.asarray(profile.phi, dtype=float)
    e = np.asarray(profile.phi_err, dtype=float)
    bend = phi[2:] + phi[:-2] - 2 * phi[1:-1]
    tol = 3.0 * np.sqrt(e[2:] ** 2 + 4 * e[1:-1] ** 2 + e[:-2] ** 2)
    return bend + tol
