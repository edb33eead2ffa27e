"""Argument-principle zero counting, refinement, scans, near-periods."""

import math

import numpy as np
import pytest

from epzeta.quadforms import QuadForm
from epzeta.epstein import EpsteinEvaluator
from epzeta.zeros import (
    BoundaryZero,
    Rectangle,
    count_strip,
    domination_abscissa,
    find_near_period,
    find_zeros,
    first_zero_right_of,
    max_real_part,
    refine_zero,
    scan_line,
    winding_count,
)

Q1 = QuadForm(1, 0, 5)
Q2 = QuadForm(2, 2, 3)


@pytest.fixture(scope="module")
def ev1():
    return EpsteinEvaluator(Q1)


@pytest.fixture(scope="module")
def ev2():
    return EpsteinEvaluator(Q2)


@pytest.fixture(scope="module")
def zeros30(ev1):
    return find_zeros(ev1, Rectangle(-1.0, 2.0, 0.1, 30.0))


class TestWinding:
    def test_empty_region(self, ev1):
        assert winding_count(ev1, Rectangle(5.0, 6.0, 0.0, 100.0)) == 0

    def test_pole_guard(self, ev1):
        with pytest.raises(ValueError):
            winding_count(ev1, Rectangle(0.5, 1.5, -1.0, 1.0))

    def test_conjugate_symmetry(self, ev1):
        up = winding_count(ev1, Rectangle(0.2, 0.9, 5.0, 20.0))
        down = winding_count(ev1, Rectangle(0.2, 0.9, -20.0, -5.0))
        assert up == down > 0

    def test_additivity_random_bisections(self, ev1, ev2):
        rng = np.random.default_rng(42)
        done = 0
        while done < 8:
            ev = (ev1, ev2)[done % 2]
            s1 = rng.uniform(-1.0, 1.5)
            t1 = rng.uniform(2.0, 35.0)
            rect = Rectangle(
                s1, s1 + rng.uniform(0.4, 1.2), t1, t1 + rng.uniform(1.0, 4.0)
            )
            frac = rng.uniform(0.3, 0.7)
            try:
                whole = winding_count(ev, rect)
                left, right = rect.halves(frac)
                parts = winding_count(ev, left) + winding_count(ev, right)
            except BoundaryZero:
                continue  # resample: contour grazed a zero
            assert whole == parts
            done += 1


class TestFindZeros:
    def test_count_matches_winding(self, zeros30):
        recs, total, minmod, _rect = zeros30
        assert total == len(recs) == 22
        assert all(r.certified for r in recs)
        assert minmod > 0

    def test_residuals(self, zeros30):
        for r in zeros30[0]:
            assert r.residual < 1e-9

    def test_isolation(self, zeros30):
        recs = zeros30[0]
        for i, a in enumerate(recs):
            for b in recs[i + 1 :]:
                assert abs(a.location - b.location) > 1e-6

    def test_functional_equation_pairing(self, zeros30):
        locs = [r.location for r in zeros30[0]]
        for z in locs:
            mirror = 1.0 - z.conjugate()
            assert min(abs(mirror - w) for w in locs) < 1e-6

    def test_refine_fixed_point(self, ev1, zeros30):
        z = zeros30[0][5].location
        rec = refine_zero(ev1, z + 1e-5)
        assert rec.certified
        assert abs(rec.location - z) < 1e-9
        assert rec.residual < 1e-10


class TestCountStrip:
    def test_positive_count(self, ev1):
        sc = count_strip(ev1, 0.6, 0.9, 50.0)
        assert sc.winding_count == len(sc.zero_list) > 0
        assert all(r.certified for r in sc.zero_list)
        assert all(0.6 < r.location.real < 0.9 for r in sc.zero_list)

    def test_empty_at_large_sigma(self, ev1):
        sc = count_strip(ev1, 5.0, 6.0, 100.0)
        assert sc.winding_count == 0
        assert sc.zero_list == []

    def test_zero_height(self, ev1):
        assert count_strip(ev1, 0.6, 0.9, 0.0).zero_list == []

    def test_precondition(self, ev1):
        with pytest.raises(ValueError):
            count_strip(ev1, 0.3, 0.9, 10.0)


class TestScanLine:
    def test_far_right_empty(self, ev1):
        assert scan_line(ev1, 6.0, 50.0, 1e-3) == []

    def test_zero_tol_empty(self, ev1):
        assert scan_line(ev1, 0.75, 50.0, 0.0) == []

    def test_precondition(self, ev1):
        with pytest.raises(ValueError):
            scan_line(ev1, 0.4, 10.0, 1e-3)

    def test_wide_tol_catches_zero(self, ev1, zeros30):
        # the t ~ 15.67 zero sits at sigma ~ 0.933
        hits = scan_line(ev1, 0.93, 20.0, 0.05)
        assert len(hits) == 1
        assert abs(hits[0].location.imag - 15.668249531278) < 1e-6


class TestNearPeriod:
    def test_vacuous_threshold(self):
        out = find_near_period(Q1, (1.5, 2.5), 100.0, 6.0)
        assert len(out) >= 3
        assert all(b - a >= 1.0 for a, b in zip(out, out[1:]))
        assert all(t0 > 1.0 for t0 in out)

    def test_actual_near_period(self, ev1):
        out = find_near_period(Q1, (2.0, 3.0), 0.1, 35.0)
        assert any(abs(t0 - 31.48) < 0.1 for t0 in out)
        # the displacement really is small on the strip
        t0 = min(out, key=lambda t: abs(t - 31.48))
        for s in (2.2 + 0.5j, 2.8 + 1.5j):
            assert abs(ev1.value(s + 1j * t0) - ev1.value(s)) < 0.1

    def test_precondition(self):
        with pytest.raises(ValueError):
            find_near_period(Q1, (0.8, 1.5), 0.1, 10.0)


class TestMaxRealPart:
    def test_domination_abscissa(self, ev1):
        sd = domination_abscissa(Q1)
        assert 1.0 < sd < 5.0
        assert winding_count(ev1, Rectangle(sd, sd + 1.0, 0.0, 50.0)) == 0

    def test_class_number_one_refused(self):
        with pytest.raises(ValueError):
            max_real_part(QuadForm(1, 0, 1), 10.0)

    def test_lower_bound_q1(self):
        # the off-line pair at t ~ 15.67 gives the bound below T = 20
        b = max_real_part(Q1, 20.0)
        assert abs(b - 0.932969697485) < 1e-6

    def test_first_zero_right_of(self, ev1):
        rec = first_zero_right_of(ev1, 0.9, 20.0)
        assert rec is not None and rec.certified
        assert abs(rec.location - (0.932969697485 + 15.668249531278j)) < 1e-6
