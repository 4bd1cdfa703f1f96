import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopercept.geometry import (
    CoverageScore,
    Disc,
    bounding_box,
    clipped_coverage_area,
    collaborative_score,
    lens_area,
    monte_carlo_region_area,
    score_profile,
)

# 2*acos(1/2) - sqrt(3)/2, mpmath at 40 digits
LENS_UNIT = 1.2283696986087568455
# pi*70^2 - 70^2 * LENS_UNIT
SCORE_70_70_140_AT_70 = 9374.7924794070783253
# lens(70, 140, 100) by mpmath quadrature of chord lengths
LENS_70_140_100 = 12392.645666582065858

radius = st.floats(0.1, 200)


def chord_quadrature_lens(r1, r2, d, n=200_001):
    """Intersection area by integrating vertical chord overlap (trapezoid)."""
    lo, hi = max(-r1, d - r2), min(r1, d + r2)
    if hi <= lo:
        return 0.0
    x = np.linspace(lo, hi, n)
    top = np.minimum(np.sqrt(np.clip(r1 * r1 - x * x, 0, None)),
                     np.sqrt(np.clip(r2 * r2 - (x - d) ** 2, 0, None)))
    return float(np.trapezoid(2 * top, x))


class TestLensArea:
    def test_identical(self):
        assert lens_area(1, 1, 0) == pytest.approx(math.pi, abs=1e-15)

    def test_tangent(self):
        assert lens_area(1, 1, 2) == 0.0

    def test_unit_lens(self):
        assert lens_area(1, 1, 1) == pytest.approx(LENS_UNIT, rel=1e-14)

    def test_unit_lens_monte_carlo(self):
        region = Disc((0, 0), 1) & Disc((1, 0), 1)
        est, se = monte_carlo_region_area(region, ((0, 1), (-1, 1)), 1_000_000, seed=3)
        assert abs(est - lens_area(1, 1, 1)) < 3 * se

    @pytest.mark.parametrize("r1, r2, d", [(1, 1, 1), (70, 140, 100), (3, 5, 6.5), (10, 2, 9.0)])
    def test_against_quadrature(self, r1, r2, d):
        assert lens_area(r1, r2, d) == pytest.approx(chord_quadrature_lens(r1, r2, d), rel=1e-6)

    def test_frozen_clip_value(self):
        assert lens_area(70, 140, 100) == pytest.approx(LENS_70_140_100, rel=1e-13)

    def test_negative(self):
        with pytest.raises(ValueError):
            lens_area(-1, 1, 0.5)

    @given(radius, radius, st.floats(0, 500))
    def test_symmetric(self, r1, r2, d):
        assert lens_area(r1, r2, d) == pytest.approx(lens_area(r2, r1, d), rel=1e-12, abs=1e-9)

    @given(radius, radius, st.floats(0, 400), st.floats(0, 50))
    def test_non_increasing(self, r1, r2, d, step):
        assert lens_area(r1, r2, d + step) <= lens_area(r1, r2, d) + 1e-9

    @given(radius, radius)
    def test_boundaries_continuous(self, r1, r2):
        inner, outer = abs(r1 - r2), r1 + r2
        small = math.pi * min(r1, r2) ** 2
        assert abs(lens_area(r1, r2, inner) - small) <= 1e-9 * max(1.0, small)
        assert lens_area(r1, r2, outer) == 0.0
        eps = 1e-9 * outer
        assert abs(lens_area(r1, r2, inner + eps) - small) < 1e-3 * max(1.0, small)
        assert lens_area(r1, r2, outer - eps) < 1e-3 * max(1.0, small)


class TestClippedCoverage:
    def test_at_ego(self):
        assert clipped_coverage_area(Disc((0, 0), 70), (0, 0), 140) == pytest.approx(math.pi * 4900)

    def test_outside(self):
        assert clipped_coverage_area(Disc((210, 0), 70), (0, 0), 140) == 0.0

    def test_partial_monte_carlo(self):
        cav = Disc((100, 0), 70)
        region = cav & Disc((0, 0), 140)
        est, se = monte_carlo_region_area(region, bounding_box(cav), 1_000_000, seed=5)
        assert clipped_coverage_area(cav, (0, 0), 140) == pytest.approx(LENS_70_140_100, rel=1e-13)
        assert abs(est - LENS_70_140_100) < 3 * se

    def test_radius_must_be_below_mcsc(self):
        with pytest.raises(ValueError, match="sensing radius exceeds MCSC"):
            clipped_coverage_area(Disc((0, 0), 140), (0, 0), 140)


class TestCollaborativeScore:
    def test_coincident_equal_radii(self):
        assert collaborative_score(Disc((0, 0), 70), Disc((0, 0), 70), 140) == 0.0

    def test_out_of_range(self):
        assert collaborative_score(Disc((0, 215), 70), Disc((0, 0), 70), 140) == 0.0

    def test_reference_value(self):
        got = collaborative_score(Disc((70, 0), 70), Disc((0, 0), 70), 140)
        assert got == pytest.approx(SCORE_70_70_140_AT_70, rel=1e-13)

    def test_reference_value_monte_carlo(self):
        cav, ego, mcsc = Disc((70, 0), 70), Disc((0, 0), 70), Disc((0, 0), 140)
        est, se = monte_carlo_region_area((cav & mcsc) - ego, bounding_box(cav), 1_000_000, seed=9)
        assert abs(est - SCORE_70_70_140_AT_70) < 3 * se

    def test_equals_union_minus_ego(self):
        # union(cav ∩ MCSC, ego) - ego, estimated directly on the union
        cav, ego, mcsc = Disc((95, 30), 60), Disc((0, 0), 70), Disc((0, 0), 140)
        union = (cav & mcsc) | ego
        est, se = monte_carlo_region_area(union, bounding_box(cav, ego), 1_000_000, seed=21)
        assert abs((est - ego.area) - collaborative_score(cav, ego, 140)) < 3 * se

    def test_smaller_cav_inside_ego(self):
        assert collaborative_score(Disc((10, 0), 20), Disc((0, 0), 70), 140) == 0.0

    def test_ego_larger_than_mcsc(self):
        with pytest.raises(ValueError):
            collaborative_score(Disc((10, 0), 20), Disc((0, 0), 150), 140)

    @given(st.floats(1, 139), st.floats(1, 140), st.floats(0, 400), st.floats(0, 2 * math.pi))
    def test_non_negative(self, r_cav, r_ego, d, theta):
        cav = Disc((d * math.cos(theta), d * math.sin(theta)), r_cav)
        assert collaborative_score(cav, Disc((0, 0), r_ego), 140) >= 0.0


class TestScoreProfile:
    def test_endpoints(self):
        prof = score_profile(70, 70, 140, 1000)
        assert prof.shape == (1000, 2)
        assert prof[0, 1] == 0.0
        assert prof[-1, 0] == 210.0 and prof[-1, 1] == 0.0

    def test_unimodal(self):
        diffs = np.diff(score_profile(70, 70, 140, 1000)[:, 1])
        signs = [s for s in np.sign(np.where(np.abs(diffs) > 1e-9, diffs, 0)) if s != 0]
        changes = sum(a != b for a, b in zip(signs, signs[1:]))
        assert changes == 1 and signs[0] > 0

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            score_profile(70, 70, 140, 2)


class TestMonteCarlo:
    def test_unit_disc(self):
        est, se = monte_carlo_region_area(Disc((0, 0), 1), ((-1, 1), (-1, 1)), 1_000_000, seed=1)
        assert abs(est - math.pi) < 3 * se

    def test_empty_region(self):
        region = Disc((0, 0), 1) & Disc((5, 0), 1)
        assert monte_carlo_region_area(region, ((-1, 6), (-1, 1)), 10_000, seed=0) == (0.0, 0.0)

    def test_deterministic(self):
        box = ((-1, 1), (-1, 1))
        assert monte_carlo_region_area(Disc((0, 0), 1), box, 5000, seed=4) == \
            monte_carlo_region_area(Disc((0, 0), 1), box, 5000, seed=4)

    def test_degenerate_box(self):
        with pytest.raises(ValueError):
            monte_carlo_region_area(Disc((0, 0), 1), ((0, 0), (-1, 1)), 10)


def test_coverage_score_invariants():
    CoverageScore(10.0, 0.5)
    with pytest.raises(ValueError):
        CoverageScore(-1.0, 0.5)
    with pytest.raises(ValueError):
        CoverageScore(1.0, 1.5)


def test_disc_radius_positive():
    with pytest.raises(ValueError):
        Disc((0, 0), 0)
