"""Special functions for the analytic layer.

Hurwitz zeta by Euler-Maclaurin (vectorized over s, with the termwise
s-derivative), Dirichlet L-functions of Kronecker characters, and a scaled
modified Bessel function of complex order for the Fourier-Bessel expansion
of Epstein zeta functions.

All Bessel work is done on exp(pi*|Im nu|/2) * K_nu(x), which stays of
moderate size at large imaginary order; the unscaled function underflows
against the 1/Gamma(s) prefactor it is always paired with.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli, loggamma, psi, roots_legendre

from .arith import kronecker

_EM_K = 18  # Euler-Maclaurin correction terms
_B2K = bernoulli(2 * _EM_K)[2 * np.arange(1, _EM_K + 1)]
_B2K_FACT = _B2K / np.array(
    [math.factorial(2 * k) for k in range(1, _EM_K + 1)]
)
_GL_X, _GL_W = roots_legendre(16)


def hurwitz_zeta(s, alpha, derivative=0):
    """zeta(s, alpha) for complex s (scalar or array), 0 < alpha <= 1.

    Euler-Maclaurin with N ~ |Im s|/2 direct terms; relative accuracy
    ~1e-13 for |Im s| up to a few thousand.  With derivative=1 returns
    (zeta, d/ds zeta), differentiated termwise.
    """
    s_in = np.asarray(s, dtype=complex)
    scalar = s_in.ndim == 0
    s_flat = np.atleast_1d(s_in).ravel()
    out = np.empty_like(s_flat)
    dout = np.empty_like(s_flat) if derivative else None
    # chunk by height so N is adapted and memory stays bounded; oversized
    # N costs accuracy at sigma < 0, so heights in a chunk stay comparable
    order = np.argsort(np.abs(s_flat.imag))
    ts = np.abs(s_flat.imag[order])
    i0 = 0
    while i0 < len(s_flat):
        i1 = i0 + 1
        tcap = max(2.0 * ts[i0], ts[i0] + 100.0)
        while i1 < len(s_flat) and i1 - i0 < 256 and ts[i1] <= tcap:
            i1 += 1
        idx = order[i0:i1]
        N = max(40, int(0.5 * ts[i1 - 1]) + 1)
        r = _hurwitz_chunk(s_flat[idx], alpha, N, derivative)
        if derivative:
            out[idx], dout[idx] = r
        else:
            out[idx] = r
        i0 = i1
    out = out.reshape(s_in.shape) if not scalar else out[0]
    if not derivative:
        return out
    dout = dout.reshape(s_in.shape) if not scalar else dout[0]
    return out, dout


def _hurwitz_chunk(s, alpha, N, derivative):
    base = np.arange(N) + alpha
    lb = np.log(base)
    terms = np.exp(-np.multiply.outer(s, lb))
    val = terms.sum(axis=1)
    if derivative:
        dval = -(terms * lb).sum(axis=1)
    x = N + alpha
    lx = math.log(x)
    xs = np.exp(-s * lx)  # x^-s
    # integral + half-term
    val += xs * (x / (s - 1) + 0.5)
    if derivative:
        dval += xs * (-lx * (x / (s - 1) + 0.5) - x / (s - 1) ** 2)
    # Bernoulli corrections: B_2k/(2k)! * (s)_{2k-1} * x^{-s-2k+1}
    poch = np.ones_like(s)
    dpoch = np.zeros_like(s)
    j = 0  # poch = (s)_j
    for k in range(1, _EM_K + 1):
        while j < 2 * k - 1:
            dpoch = dpoch * (s + j) + poch
            poch = poch * (s + j)
            j += 1
        pw = xs * x ** (1 - 2 * k)
        c = _B2K_FACT[k - 1]
        val += c * poch * pw
        if derivative:
            dval += c * (dpoch - lx * poch) * pw
    if derivative:
        return val, dval
    return val


def riemann_zeta(s, derivative=0):
    """zeta(s) on C \\ {1}, scalar or array."""
    return hurwitz_zeta(s, 1.0, derivative)


def dirichlet_L(s, d, derivative=0):
    """L(s, chi_d) for a fundamental discriminant d (d = 1 gives zeta).

    Computed as q^-s sum_a chi(a) zeta(s, a/q), q = |d|, valid on all of C
    (minus the pole at s = 1 when d = 1).
    """
    if d == 1:
        return riemann_zeta(s, derivative)
    s = np.asarray(s, dtype=complex)
    at_pole = s == 1.0
    if np.any(at_pole):
        # the 1/(s-1) poles of the Hurwitz terms cancel (sum chi(a) = 0);
        # at s = 1 exactly, zeta(s, a) - 1/(s-1) -> -psi(a)
        s = np.where(at_pole, 1.0 + 1e-7j, s)
        near = dirichlet_L(s, d, derivative)
        q = abs(d)
        exact = -sum(
            kronecker(d, a) * psi(a / q) for a in range(1, q + 1)
        ) / q
        if derivative:
            v, dv = near
            return np.where(at_pole, exact, v), dv
        return np.where(at_pole, exact, near)
    q = abs(d)
    lq = math.log(q)
    qs = np.exp(-s * lq)
    val = np.zeros_like(s)
    dval = np.zeros_like(s) if derivative else None
    for a in range(1, q + 1):
        ch = kronecker(d, a)
        if ch == 0:
            continue
        if derivative:
            hz, dhz = hurwitz_zeta(s, a / q, 1)
            val = val + ch * hz
            dval = dval + ch * dhz
        else:
            val = val + ch * hurwitz_zeta(s, a / q)
    if derivative:
        return qs * val, qs * (dval - lq * val)
    return qs * val


def gamma_ratio(s1, s2):
    """Gamma(s1)/Gamma(s2), stable at large height."""
    return np.exp(loggamma(s1) - loggamma(s2))


def inv_gamma_scaled(s):
    """exp(-pi |Im s| / 2) / Gamma(s): the 1/Gamma factor with the
    exponential growth removed, for pairing against scaled Bessel values."""
    s = np.asarray(s, dtype=complex)
    return np.exp(-loggamma(s) - 0.5 * np.pi * np.abs(s.imag))


def _gl_nodes(a, b, n_panels):
    """Composite 16-point Gauss-Legendre nodes and weights on [a, b]."""
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return u, w


def _khat_strip(nu, x):
    """exp(pi t / 2) K_nu(x) for |Re nu| < 1, t = Im nu >= 4, x > 0.

    Uses K_nu(x) = sec(nu pi/2) int_0^inf cos(x sinh u) cosh(nu u) du with
    the two exponential halves of the cosine pushed onto rotated contours
    u = U +- i w, where they decay like exp(-x cosh(U) sin w + t w).
    """
    t = nu.imag
    # x cosh U large enough that the rotated legs decay and the horizontal
    # remainder at w = pi/2 is below 1e-18
    A = max(45.0, 1.4 * (0.5 * np.pi) * t + 45.0)
    U = math.acosh(max(A / x, 1.000001))
    A = x * math.cosh(U)
    sh = x * math.sinh(U)

    # main leg [0, U]: integrand cos(x sinh u) cosh(nu u)
    phase = sh + (t + 1.0) * U
    u, w = _gl_nodes(0.0, U, max(4, int(phase / 6.0) + 1))
    main = np.sum(w * np.cos(x * np.sinh(u)) * np.cosh(nu * u))

    # rotated legs w in (0, pi/2]; e^{+ix sinh} goes up, e^{-ix sinh} down
    phase_v = (sh + t + 1.0) * (0.5 * np.pi)
    wv, ww = _gl_nodes(0.0, 0.5 * np.pi, max(4, int(phase_v / 6.0) + 1))
    up = U + 1j * wv
    dn = U - 1j * wv
    leg_up = 1j * np.sum(ww * 0.5 * np.exp(1j * x * np.sinh(up)) * np.cosh(nu * up))
    leg_dn = -1j * np.sum(ww * 0.5 * np.exp(-1j * x * np.sinh(dn)) * np.cosh(nu * dn))
    integral = main + leg_up + leg_dn

    # exp(pi t/2) sec(pi nu/2) without large intermediates:
    # cos(pi nu/2) = (e^{pi t/2}/2) [cos(a)(1+E) - i sin(a)(1-E)], E = e^{-pi t}
    a = 0.5 * np.pi * nu.real
    E = math.exp(-np.pi * t)
    pref = 2.0 / (math.cos(a) * (1 + E) - 1j * math.sin(a) * (1 - E))
    return pref * integral


def _khat_direct(nu, x):
    """exp(pi |t| / 2) K_nu(x) for small |Im nu| via the real-exponential
    integral K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du."""
    t = abs(nu.imag)
    # integrand decays like exp(-x cosh u + |Re nu| u); truncate safely
    U = 1.0
    while x * math.cosh(U) - 2.0 * U < x + 45.0:
        U += 0.5
    u, w = _gl_nodes(
        0.0, U, max(8, int((x * math.sinh(U) + (t + 2) * U) / 6.0) + 1)
    )
    val = np.sum(w * np.exp(-x * np.cosh(u)) * np.cosh(nu * u))
    return math.exp(0.5 * np.pi * t) * val


def besselk_scaled(nu, x):
    """exp(pi |Im nu| / 2) K_nu(x) for complex order nu and real x > 0."""
    nu = complex(nu)
    if x <= 0:
        raise ValueError("argument must be positive")
    if nu.real < 0:
        nu = -nu  # K_nu = K_{-nu}
    if nu.imag < 0:
        return np.conj(besselk_scaled(np.conj(nu), x))
    t = nu.imag
    if x > t:
        # strongly decayed regime: the scaled value is ~exp(-sexp) and the
        # quadrature error is absolute at the O(1) scale of K^ near x ~ t
        sexp = math.sqrt(x * x - t * t) - t * math.acos(t / max(x, 1e-300))
        if sexp > 50.0:
            return 0.0 + 0.0j
    if t < 6.0:
        # oscillation in cosh(nu u) is mild; the real integral is stable
        return _khat_direct(nu, x)
    m = int(math.floor(nu.real))
    mu = nu - m  # Re mu in [0, 1)
    if min(mu.real, 1.0 - mu.real) < 1e-8:
        # base orders would sit on the |Re| = 1 boundary of the strip
        # representation; Richardson average over real shifts of the order
        d = 0.01
        vals = [
            0.5 * (besselk_scaled(nu + dd, x) + besselk_scaled(nu - dd, x))
            for dd in (d, 2 * d, 4 * d)
        ]
        r1 = (4 * vals[0] - vals[1]) / 3
        r2 = (4 * vals[1] - vals[2]) / 3
        return (16 * r1 - r2) / 15
    k_lo = _khat_strip(mu - 1, x)
    k_hi = _khat_strip(mu, x)
    for j in range(m):
        k_lo, k_hi = k_hi, k_lo + (2 * (mu + j) / x) * k_hi
    return k_hi
