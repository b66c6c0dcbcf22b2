"""Tests for the cap metric, the cap functional, the split and the decomposition."""

import math

import numpy as np
import pytest

from sharp_extension.errors import FieldError
from sharp_extension.src.caps.caps import (
    cap_distance,
    cap_functional_max,
    decompose,
    lattice_radii,
    split,
)
from sharp_extension.src.convolutions.convolutions import cap_interaction
from sharp_extension.src.data.sample_functions import smooth_bump, two_bump
from sharp_extension.src.fields.arc_function import ArcFunction, cap_mask, l1_sigma_norm, l2_sigma_norm
from sharp_extension.src.models.specs import Cap, DecompositionParams


class TestCapDistance:
    """Tests for the hyperbolic cap distance."""

    def test_matches_arccosh(self):
        a, b = Cap(center=0.1, radius=0.05), Cap(center=0.9, radius=0.2)
        expected = math.acosh(1.0 + ((0.8) ** 2 + 0.15 ** 2) / (2.0 * 0.05 * 0.2))
        assert cap_distance(a, b) == pytest.approx(expected, rel=1e-12)

    def test_metric_axioms(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            c = rng.uniform(0.0, 1.0, 3)
            r = 10.0 ** rng.uniform(-3.0, 0.0, 3)
            a, b, d = (Cap(center=float(c[k]), radius=float(r[k])) for k in range(3))
            assert cap_distance(a, b) == cap_distance(b, a)
            assert cap_distance(a, a) == 0.0
            assert cap_distance(a, d) <= cap_distance(a, b) + cap_distance(b, d) + 1e-12

    def test_dilation_invariance(self):
        a, b = Cap(center=0.3, radius=0.01), Cap(center=0.35, radius=0.02)
        scaled = Cap(center=3.0, radius=0.1), Cap(center=3.5, radius=0.2)
        assert cap_distance(*scaled) == pytest.approx(cap_distance(a, b), rel=1e-12)

    def test_interaction_decays_with_distance(self, circle_arc):
        r = circle_arc.length / 20.0
        base = Cap(center=2.0 * r, radius=r)
        rows = []
        for offset in (0.0, 1.0, 3.0, 6.0, 12.0):
            other = Cap(center=base.center + offset * r, radius=r)
            normalized = cap_interaction(circle_arc, base, other) / (2.0 * r)
            rows.append((cap_distance(base, other), normalized))
        distances = [d for d, _ in rows]
        values = [v for _, v in rows]
        assert distances == sorted(distances)
        assert all(later < earlier for earlier, later in zip(values[1:], values[2:]))


class TestCapFunctional:
    """Tests for the cap functional and the split."""

    def test_lattice_radii(self, circle_arc):
        radii = lattice_radii(circle_arc)
        assert radii[0] == pytest.approx(circle_arc.length)
        assert all(b == pytest.approx(0.5 * a) for a, b in zip(radii, radii[1:]))
        assert radii[-1] >= 4.0 * circle_arc.step

    def test_finds_bump(self, circle_arc):
        f = smooth_bump(circle_arc, 0.5, 0.05)
        best = cap_functional_max(f)
        assert best.cap.center == pytest.approx(0.5, abs=circle_arc.step)
        assert best.cap.radius < 0.2
        assert best.value > 0.0

    def test_zero_function(self, circle_arc):
        with pytest.raises(FieldError):
            cap_functional_max(ArcFunction.constant(circle_arc, 0.0))

    def test_homogeneity(self, circle_arc):
        f = two_bump(circle_arc, (0.4, 1.1), 0.15)
        best = cap_functional_max(f)
        scaled = cap_functional_max(f.scaled(2.5))
        assert scaled.cap == best.cap
        assert scaled.value == pytest.approx(2.5 ** 1.5 * best.value, rel=1e-12)

    def test_constant_prefers_largest_cap(self, circle_arc):
        best = cap_functional_max(ArcFunction.constant(circle_arc, 2.0))
        assert best.cap.radius == pytest.approx(circle_arc.length)
        assert best.value == pytest.approx(2.0 ** 1.5 * circle_arc.length ** 0.75, rel=1e-9)

    def test_split(self, circle_arc):
        f = two_bump(circle_arc, (0.4, 1.1), 0.15)
        parts = split(f)
        assert np.array_equal(parts.g.values + parts.h.values, f.values)
        assert np.all(parts.g.real <= parts.threshold)
        assert not np.any(parts.g.values[~cap_mask(f, parts.cap)])
        inside = np.sum(parts.g.weights * parts.g.real ** 1.5)
        assert inside >= 0.5 * parts.cap_integral
        assert parts.holder_lower_bound() <= l2_sigma_norm(parts.g) * (1.0 + 1e-12)
        assert 0.0 < parts.l1_lower_bound() <= l1_sigma_norm(parts.g) * (1.0 + 1e-12)

    def test_split_rejects_negative(self, circle_arc):
        with pytest.raises(FieldError):
            split(smooth_bump(circle_arc, 0.5, 0.1).scaled(-1.0))


class TestDecomposition:
    """Tests for the cap decomposition."""

    @pytest.fixture
    def result(self, circle_arc):
        length = circle_arc.length
        f = two_bump(circle_arc, (0.3 * length, 0.7 * length), 0.08 * length, (1.0, 0.6))
        return f, decompose(f, DecompositionParams(c_estimate=3.0))

    def test_reconstruction_exact(self, result):
        f, decomposition = result
        mismatch = np.max(np.abs(decomposition.reconstruction() - f.values))
        assert mismatch <= 1e-12 * np.max(np.abs(f.values))

    def test_sandwich_every_step(self, result):
        _, decomposition = result
        assert decomposition.steps
        for step in decomposition.steps:
            report = step.report
            assert report.sandwich_holds
            assert report.lower_bound <= report.triple_norm <= report.upper_bound

    def test_eps_star_nonincreasing(self, result):
        _, decomposition = result
        eps = decomposition.eps_star
        assert all(b <= a for a, b in zip(eps, eps[1:]))

    def test_residual_small(self, result):
        f, decomposition = result
        assert len(decomposition.steps) <= 20
        assert l2_sigma_norm(decomposition.residual) <= 1e-3 * l2_sigma_norm(f)

    def test_caps_at_bumps(self, result, circle_arc):
        _, decomposition = result
        length = circle_arc.length
        for center in (0.3 * length, 0.7 * length):
            nearest = min(abs(cap.center - center) for cap in decomposition.caps)
            assert nearest <= circle_arc.step

    def test_pieces_bounded_by_source(self, result):
        f, decomposition = result
        total = sum(l2_sigma_norm(step.piece) ** 2 for step in decomposition.steps)
        assert total <= l2_sigma_norm(f) ** 2 * (1.0 + 1e-12)

    def test_zero_function(self, circle_arc):
        f = ArcFunction.constant(circle_arc, 0.0)
        decomposition = decompose(f, DecompositionParams(c_estimate=3.0))
        assert decomposition.steps == []
        assert decomposition.stop_reason == "zero_remainder"
        assert decomposition.residual.is_zero()

    def test_rejects_negative(self, circle_arc):
        with pytest.raises(FieldError):
            decompose(ArcFunction.constant(circle_arc, -1.0), DecompositionParams(c_estimate=3.0))
