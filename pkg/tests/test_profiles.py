"""Tests for upper profiles and the concentration metric."""

import numpy as np
import pytest

from sharp_extension.errors import FieldError
from sharp_extension.src.caps.profiles import (
    best_cap_fraction,
    concentration_metric,
    concentration_radii,
    upper_profile,
)
from sharp_extension.src.data.sample_functions import (
    concentrating_sequence,
    parabola_gaussian,
    smooth_bump,
)
from sharp_extension.src.fields.arc_function import ArcFunction, l2_sigma_norm
from sharp_extension.src.models.specs import Cap


class TestUpperProfile:
    """Tests for the height and space tails."""

    def test_tails_at_zero_and_infinity(self, circle_arc):
        f = smooth_bump(circle_arc, 0.75, 0.5)
        total = l2_sigma_norm(f) ** 2
        profile = upper_profile(f, Cap(center=0.75, radius=0.05), [0.0, 100.0])
        assert profile.tail_height[0] == pytest.approx(total, rel=1e-12)
        assert profile.tail_space[0] == pytest.approx(total, rel=1e-6)
        assert profile.tail_height[1] == 0.0
        assert profile.tail_space[1] == pytest.approx(0.0, abs=1e-12)

    def test_tails_nonincreasing(self, circle_arc):
        f = smooth_bump(circle_arc, 0.6, 0.4)
        profile = upper_profile(f, Cap(center=0.6, radius=0.02), [1.0, 2.0, 4.0, 8.0, 16.0])
        assert all(b <= a + 1e-12 for a, b in zip(profile.tail_height, profile.tail_height[1:]))
        assert all(b <= a + 1e-12 for a, b in zip(profile.tail_space, profile.tail_space[1:]))

    def test_graph_grid(self, gaussian_parabola_arc):
        f = parabola_gaussian(gaussian_parabola_arc)
        center = 0.5 * gaussian_parabola_arc.length
        profile = upper_profile(f, Cap(center=center, radius=1.0), [0.0, 30.0])
        assert profile.tail_space[0] == pytest.approx(l2_sigma_norm(f) ** 2, rel=1e-6)
        assert profile.tail_space[1] == pytest.approx(0.0, abs=1e-9)


class TestConcentration:
    """Tests for small-cap mass fractions."""

    def test_radii_ladder(self, oval_arc):
        radii = concentration_radii(ArcFunction.constant(oval_arc))
        assert radii[0] == pytest.approx(0.75)
        assert len(radii) == 6

    def test_constant_fraction(self, circle_arc):
        fraction, _ = best_cap_fraction(ArcFunction.constant(circle_arc), 0.375)
        assert fraction == pytest.approx(0.5, abs=0.01)

    def test_zero_function(self, circle_arc):
        with pytest.raises(FieldError):
            best_cap_fraction(ArcFunction.constant(circle_arc, 0.0), 0.1)

    def test_concentrating_at_minimum(self, oval_arc):
        fs = concentrating_sequence(oval_arc, 0.75, (8.0, 16.0, 32.0, 64.0))
        report = concentration_metric(fs)
        assert report.concentrated
        assert report.center == pytest.approx(0.75, abs=2.0 * oval_arc.step)
        assert report.at_curvature_minimum
        assert report.kappa_at_center == pytest.approx(oval_arc.lambda_min, rel=1e-4)
        last = [row[-1] for row in report.fractions]
        assert last == sorted(last)

    def test_array_radii(self, oval_arc):
        fs = concentrating_sequence(oval_arc, 0.75, (8.0, 16.0, 32.0, 64.0))
        ladder = np.array([0.2, 0.05, 0.1])
        report = concentration_metric(fs, radii=ladder)
        assert report.radii == [0.2, 0.1, 0.05]
        assert report.concentrated == concentration_metric(fs, radii=[0.2, 0.1, 0.05]).concentrated

    def test_concentrating_away_from_minimum(self, oval_arc):
        report = concentration_metric(concentrating_sequence(oval_arc, 0.3, (8.0, 16.0, 32.0, 64.0)))
        assert report.concentrated
        assert not report.at_curvature_minimum

    def test_diffuse(self, oval_arc):
        fs = [smooth_bump(oval_arc, 0.75, 0.6) for _ in range(3)]
        assert not concentration_metric(fs).concentrated

    def test_needs_common_arc(self, oval_arc, circle_arc):
        with pytest.raises(FieldError):
            concentration_metric([ArcFunction.constant(oval_arc), ArcFunction.constant(circle_arc)])
