"""Jensen profiles: time averages, torus averages, linearity detection."""

import math

import numpy as np
import pytest

from epzeta.quadforms import QuadForm
from epzeta.epstein import EpsteinEvaluator
from epzeta.jensen import (
    JensenProfile,
    TruncatedEpstein,
    convexity_margins,
    derivative_profile,
    detect_linearity,
    jensen_profile,
    jensen_time_average,
    jensen_torus,
    zero_frequency,
)
from epzeta.randmodel import TorusModel

Q1 = QuadForm(1, 0, 5)
Q2 = QuadForm(2, 2, 3)
LOG2 = math.log(2)


@pytest.fixture(scope="module")
def ev1():
    return EpsteinEvaluator(Q1)


@pytest.fixture(scope="module")
def ev2():
    return EpsteinEvaluator(Q2)


@pytest.fixture(scope="module")
def prof2(ev2):
    # Q2 on (5, 6): affine regime, slope -log 2 (minimum of Q2 is 2)
    return jensen_profile(ev2, 5.0, 6.0, 200.0, spacing=0.05, step=0.05)


class TestTimeAverage:
    def test_sigma_large_q1(self, ev1):
        v, e = jensen_time_average(ev1, 6.0, 200.0, step=0.05)
        assert abs(v - LOG2) < 1e-3

    def test_sigma_large_q2(self, ev2):
        # minimum value n0 = 2 with a_{n0} = 2: phi = -6 log 2 + log 2
        v, e = jensen_time_average(ev2, 6.0, 200.0, step=0.05)
        assert abs(v - (-5 * LOG2)) < 2e-3

    def test_sigma_eight_law(self, ev1, ev2):
        v1, _ = jensen_time_average(ev1, 8.0, 100.0, step=0.05)
        assert abs(v1 - LOG2) < 1e-3
        v2, _ = jensen_time_average(ev2, 8.0, 100.0, step=0.05)
        assert abs(v2 - (-8 * LOG2 + LOG2)) < 1e-3

    def test_large_x(self, ev1):
        v, _ = jensen_time_average(ev1, 2.0, 50.0, x=1e6)
        assert abs(v - math.log(1e6)) < 1e-4

    def test_T0_independence(self):
        tr = TruncatedEpstein(Q1, 4)
        a = jensen_time_average(tr, 1.5, 5000.0, T0=1.0, step=0.02)
        b = jensen_time_average(tr, 1.5, 5000.0, T0=10.0, step=0.02)
        assert abs(a[0] - b[0]) < a[1] + b[1]

    def test_through_zero_excision(self, ev1):
        # off-line zero at 0.932969697485 + 15.668i sits on this line;
        # excision keeps the average consistent with a nearby line
        v, e = jensen_time_average(ev1, 0.932969697485, 30.0, step=0.02)
        v2, _ = jensen_time_average(ev1, 0.9329, 30.0, step=0.02)
        assert abs(v - v2) < 1e-3

    def test_T_guard(self, ev1):
        with pytest.raises(ValueError):
            jensen_time_average(ev1, 2.0, 0.5, T0=1.0)


class TestTorus:
    def test_n_zero_exact(self):
        v, e = jensen_torus(TorusModel(Q1, 0, 3.0))
        assert v == math.log(2.0) and e == 0.0

    def test_matches_time_average(self):
        m = TorusModel(Q1, 4, 1.5)
        tv, te = jensen_torus(m)
        tr = TruncatedEpstein(Q1, 4)
        ta, tae = jensen_time_average(tr, 1.5, 5000.0, step=0.02)
        assert abs(tv - ta) < 3 * (te + tae)

    def test_approaches_log2(self):
        # x = 0, sigma = 3: phi_{E_n} -> log 2 as n grows
        vals = [
            jensen_torus(TorusModel(Q1, n, 3.0), n_points=2**12)[0]
            for n in (0, 4, 8)
        ]
        assert abs(vals[-1] - LOG2) < 1e-2

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            jensen_torus(TorusModel(Q1, 13, 1.5))

    def test_rebuild_at_sigma(self):
        m = TorusModel(Q1, 4, 1.5)
        v_direct, _ = jensen_torus(TorusModel(Q1, 4, 2.0), seed=3)
        v_moved, _ = jensen_torus(m, sigma=2.0, seed=3)
        assert v_direct == v_moved

    @pytest.mark.slow
    def test_truncation_converges(self, ev1):
        # at sigma = 1.5 the truncations have already converged to the
        # full phi below measurement resolution for every n in {4,6,8}
        full, ferr = jensen_time_average(ev1, 1.5, 2000.0, step=0.02)
        for n in (4, 6, 8):
            v, e = jensen_torus(TorusModel(Q1, n, 1.5), n_points=2**13)
            assert abs(v - full) < ferr + 5 * e + 1e-5
        # the decrease itself is resolvable at sigma = 0.75 between n=2
        # and n=8 (the n in between add only weak inert primes)
        ref, re_ = jensen_torus(TorusModel(Q1, 12, 0.75), n_points=2**13)
        g2 = abs(jensen_torus(TorusModel(Q1, 2, 0.75), n_points=2**13)[0] - ref)
        g8 = abs(jensen_torus(TorusModel(Q1, 8, 0.75), n_points=2**13)[0] - ref)
        assert g2 > g8


class TestDerivativeProfile:
    def test_affine_input(self):
        g = np.arange(2.0, 3.0, 0.05)
        phi = -LOG2 * g + LOG2
        prof = derivative_profile(
            JensenProfile(g, phi, np.full(len(g), 1e-10), 100.0)
        )
        assert np.allclose(prof.dphi[1:-1], -LOG2)
        assert np.allclose(prof.d2phi[1:-1], 0.0, atol=1e-8)

    def test_nonuniform_grid_refused(self):
        g = np.array([1.0, 1.1, 1.3])
        with pytest.raises(ValueError):
            derivative_profile(JensenProfile(g, g, g * 0, 1.0))

    def test_error_propagation(self):
        g = np.arange(0.0, 1.0, 0.1)
        prof = derivative_profile(
            JensenProfile(g, g * 0, np.full(len(g), 1e-3), 1.0)
        )
        assert prof.dphi_err[1] == pytest.approx(
            math.hypot(1e-3, 1e-3) / 0.2
        )


class TestLinearity:
    def test_q2_interval(self, prof2):
        rep = detect_linearity(prof2)
        assert len(rep.intervals) == 1
        lo, hi, slope = rep.intervals[0]
        assert abs(slope + LOG2) < 1e-2
        assert rep.slope_match[0] == 2

    def test_strictly_convex_empty(self):
        g = np.arange(1.5, 2.5, 0.05)
        prof = JensenProfile(g, g**2, np.full(len(g), 1e-8), 1.0)
        rep = detect_linearity(prof)
        assert rep.intervals == []

    def test_sigma_guard(self, prof2):
        g = np.arange(0.5, 1.5, 0.05)
        with pytest.raises(ValueError):
            detect_linearity(JensenProfile(g, g * 0, g * 0 + 1e-6, 1.0))


class TestZeroFrequency:
    def test_same_point(self, prof2):
        v, e = zero_frequency(prof2, 5.5, 5.5)
        assert v == 0.0

    def test_q2_zero_free_strip(self, prof2):
        v, e = zero_frequency(prof2, 5.2, 5.8)
        assert abs(v) < 3 * e + 1e-3

    def test_boundary_refused(self, prof2):
        with pytest.raises(ValueError):
            zero_frequency(prof2, 5.0, 5.5)


class TestConvexity:
    def test_q2_profile_convex(self, prof2):
        assert np.all(convexity_margins(prof2) >= 0.0)

    def test_synthetic_violation(self):
        g = np.arange(0.0, 1.0, 0.1)
        phi = -(g**2)  # concave
        m = convexity_margins(JensenProfile(g, phi, g * 0 + 1e-9, 1.0))
        assert np.any(m < 0.0)
