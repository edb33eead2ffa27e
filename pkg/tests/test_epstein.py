"""Epstein evaluator against lattice and theta oracles."""

import math

import numpy as np
import pytest

from epzeta.quadforms import QuadForm
from epzeta.epstein import (
    EpsteinEvaluator,
    check_functional_equation,
    eval_derivative,
    eval_fast,
    eval_lattice_oracle,
    eval_theta_oracle,
    fe_relative_residual,
)

Q1 = QuadForm(1, 0, 5)
Q2 = QuadForm(2, 2, 3)
Q23 = QuadForm(1, 1, 6)  # h = 3, exercises the Bessel route
Q23B = QuadForm(2, 1, 3)


@pytest.fixture(scope="module")
def ev1():
    return EpsteinEvaluator(Q1)


@pytest.fixture(scope="module")
def ev2():
    return EpsteinEvaluator(Q2)


@pytest.fixture(scope="module")
def ev23():
    return EpsteinEvaluator(Q23)


class TestLatticeOracle:
    def test_two_radii_agree(self):
        v1, e1 = eval_lattice_oracle(Q1, 2.0, 1000)
        v2, e2 = eval_lattice_oracle(Q1, 2.0, 2000)
        assert e2 < 1e-6
        assert abs(v1 - v2) <= e1 + e2

    def test_classical_identity(self):
        # sum' (m^2+n^2)^-2 = 4 zeta(2) beta(2), beta(2) = Catalan
        catalan = 0.915965594177219015054603514932
        ref = 4 * (math.pi**2 / 6) * catalan
        v, e = eval_lattice_oracle(QuadForm(1, 0, 1), 2.0, 2000)
        assert abs(v - ref) <= e
        assert e < 1e-6

    def test_monotone_in_radius(self):
        vals = [eval_lattice_oracle(Q1, 2.0, r)[0].real for r in (10, 20, 50)]
        assert vals[0] < vals[1] < vals[2]

    def test_rejects_small_sigma(self):
        with pytest.raises(ValueError):
            eval_lattice_oracle(Q1, 1.1 + 3j, 100)


class TestFastEvaluator:
    def test_s2_matches_lattice(self, ev1):
        lat, tail = eval_lattice_oracle(Q1, 2.0, 2000)
        assert abs(ev1.value(2.0 + 0j) - lat) <= tail + 1e-9

    def test_q2_matches_lattice(self, ev2):
        lat, tail = eval_lattice_oracle(Q2, 1.5 + 3j, 4000)
        assert abs(ev2.value(1.5 + 3j) - lat) <= tail

    def test_oracle_agreement_random(self, ev1, ev2):
        rng = np.random.default_rng(17)
        for ev, Q in ((ev1, Q1), (ev2, Q2)):
            for _ in range(6):
                s = complex(rng.uniform(1.3, 3.0), rng.uniform(-50, 50))
                lat, tail = eval_lattice_oracle(Q, s, 1500)
                err = tail + float(ev.error_bound(np.atleast_1d(s))[0])
                assert abs(ev.value(s) - lat) <= err

    def test_theta_oracle_agreement(self, ev1, ev23):
        for ev, Q in ((ev1, Q1), (ev23, Q23)):
            for s in (1.3 + 5j, 0.7 + 14.1j, -0.5 + 30j, 2.9 - 47j):
                ref = eval_theta_oracle(Q, s)
                assert abs(ev.value(s) - ref) <= 1e-9

    def test_special_value_at_zero(self, ev1, ev23):
        # E(0, Q) = -1 for every form (Lambda regular, Gamma pole at 0)
        assert ev1.value(0j) == pytest.approx(-1.0, abs=1e-12)
        assert ev23.value(0j) == pytest.approx(-1.0, abs=1e-10)

    def test_trivial_zero(self, ev23):
        assert abs(ev23.value(-1.0 + 0j)) < 1e-9

    def test_pole_raises(self, ev1):
        with pytest.raises(ValueError):
            ev1.value(1.0 + 0j)

    def test_conjugate_symmetry(self, ev1, ev23):
        for ev in (ev1, ev23):
            for s in (0.8 + 13.7j, 1.6 + 3j, -0.2 + 9j):
                assert abs(
                    ev.value(np.conj(s)) - np.conj(ev.value(s))
                ) <= 1e-12 * abs(ev.value(s))

    def test_real_on_real_axis(self, ev1):
        for sig in (2.0, 1.5, 0.25, -0.75):
            v = ev1.value(complex(sig))
            assert v.imag == 0.0

    def test_near_half_bessel_route(self, ev23):
        # the two principal terms individually blow up near s = 1/2; the
        # circle-mean path must agree with plain evaluation nearby
        a = ev23.value(0.5 + 0j)
        b = ev23.value(0.5005 + 0j)
        assert abs(a - b) < 1e-2
        ref = eval_theta_oracle(Q23, 0.5 + 0j)
        assert abs(a - ref) < 1e-9

    def test_residue_class_invariant(self, ev1, ev2):
        ref = 2 * math.pi / math.sqrt(20)
        for ev in (ev1, ev2):
            vals = [(10.0**-k) * ev.value(1 + 10.0**-k) for k in (3, 4, 5, 6)]
            assert abs(vals[-1] - ref) < 1e-4
            assert abs(vals[-1] - vals[-2]) < abs(vals[0] - vals[-1])

    def test_values_vectorized(self, ev1):
        ss = np.array([2 + 0j, 1.5 + 3j, 0.7 + 20j, -0.5 + 4j])
        vv = ev1.values(ss)
        for s, v in zip(ss, vv):
            assert abs(v - ev1.value(complex(s))) < 1e-12 * max(abs(v), 1)


class TestDerivative:
    def test_matches_finite_difference(self, ev1, ev23):
        h = 1e-5
        for ev in (ev1, ev23):
            for s in (2.0 + 0j, 1.1 + 7j, 0.6 + 2.4j):
                d = ev.derivative(s)
                fd = (ev.value(s + h) - ev.value(s - h)) / (2 * h)
                assert abs(d - fd) <= 1e-6 * abs(d)

    def test_real_on_real_axis(self, ev1):
        assert ev1.derivative(2.0 + 0j).imag == 0.0

    def test_conjugate(self, ev2):
        s = 1.4 + 9.2j
        assert eval_derivative(Q2, np.conj(s)) == pytest.approx(
            np.conj(eval_derivative(Q2, s))
        )


class TestFunctionalEquation:
    def test_fixed_point(self):
        assert check_functional_equation(Q1, 0.5 + 0j) < 1e-14

    def test_spec_points(self):
        assert check_functional_equation(Q1, 0.7 + 14.1j) < 1e-8
        assert check_functional_equation(Q2, 1.2 + 33j) < 1e-8

    def test_relative_residual_grid(self):
        rng = np.random.default_rng(23)
        for _ in range(12):
            s = complex(rng.uniform(-1, 2), rng.uniform(0.2, 100))
            assert fe_relative_residual(Q1, s) < 1e-10

    def test_bessel_route_residual(self):
        for s in (0.7 + 14.1j, 1.2 + 33j, -0.5 + 60j):
            assert fe_relative_residual(Q23, s) < 1e-10


class TestCompleted:
    def test_lambda_consistency(self, ev1):
        s = 0.8 + 21.0j
        cv = ev1.completed(s)
        import scipy.special as sp

        lam = (
            np.exp(s * math.log(math.sqrt(20) / (2 * math.pi)) + sp.loggamma(s))
            * cv.raw
        )
        assert abs(cv.lambda_value - lam) <= 1e-12 * abs(lam)

    def test_eval_fast_interface(self):
        cv = eval_fast(Q1, 2.0 + 0j)
        lat, tail = eval_lattice_oracle(Q1, 2.0, 2000)
        assert abs(cv.raw - lat) <= tail + 1e-9
        assert cv.error < 1e-9
