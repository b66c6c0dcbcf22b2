"""Tests for arc construction and curvature checks."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from sharp_extension.errors import GeometryError
from sharp_extension.src.geometry.arc_geometry import (
    build_arc,
    build_from_curvature,
    check_k2_condition,
    check_no_colinear_tangents,
)
from sharp_extension.src.geometry.quadrature import gauss_legendre_panels, simpson_weights
from sharp_extension.src.models.specs import (
    CircleSpec,
    CurvatureSamplesSpec,
    ParabolaSpec,
    PerturbedParabolaSpec,
)


class TestQuadrature:
    """Tests for the shared quadrature rules."""

    def test_simpson_exact_for_cubics(self):
        x = np.linspace(0.0, 2.0, 11)
        w = simpson_weights(11, 0.2)
        assert np.sum(w * x ** 3) == pytest.approx(4.0, rel=1e-13)

    def test_simpson_rejects_even_count(self):
        with pytest.raises(ValueError):
            simpson_weights(10, 0.1)

    def test_panels_end_on_breaks(self):
        nodes, weights, segment = gauss_legendre_panels((0.0, 1.0, 2.5), 0.4, 4)
        assert np.sum(weights[segment == 0]) == pytest.approx(1.0)
        assert np.sum(weights[segment == 1]) == pytest.approx(1.5)
        assert np.all(nodes[segment == 1] > 1.0)


class TestCircle:
    """Tests for circle arcs."""

    def test_length_and_curvature(self, circle_arc):
        assert circle_arc.length == pytest.approx(1.5)
        assert np.allclose(circle_arc.kappa, 1.0)
        assert circle_arc.lambda_min == pytest.approx(1.0)

    def test_points_lie_on_circle(self, circle_arc):
        radius = np.linalg.norm(circle_arc.gamma - np.array([0.0, 1.0]), axis=1)
        assert np.allclose(radius, 1.0, atol=1e-14)

    def test_odd_sample_count(self):
        arc = build_arc(CircleSpec(radius=2.0, extent=1.0), 256)
        assert arc.n == 257

    def test_matches_curvature_samples(self, circle_arc):
        samples = CurvatureSamplesSpec(kappa=[1.0] * 7, length=1.5)
        arc = build_from_curvature(samples, circle_arc.n)
        assert np.max(np.abs(arc.gamma - circle_arc.gamma)) < 1e-9
        assert np.max(np.abs(arc.theta - circle_arc.theta)) < 1e-12

    def test_colinear_margin(self, circle_arc):
        assert check_no_colinear_tangents(circle_arc) == pytest.approx(2.0 * math.cos(0.75), rel=1e-9)

    def test_half_turn_is_rejected(self):
        with pytest.raises(GeometryError):
            build_arc(CircleSpec(radius=1.0, extent=3.5), 513)

    def test_interpolation(self, circle_arc):
        s = np.array([0.123, 1.01])
        assert np.allclose(circle_arc.position_at(s), np.column_stack([np.sin(s), 1.0 - np.cos(s)]), atol=1e-10)
        assert np.allclose(circle_arc.theta_at(s), s, atol=1e-12)


class TestGraphs:
    """Tests for graph-built arcs."""

    def test_parabola_length(self, parabola_arc):
        a = 4.0
        expected = a * math.sqrt(1.0 + a * a) + math.asinh(a)
        assert parabola_arc.length == pytest.approx(expected, rel=1e-9)

    def test_parabola_curvature(self, parabola_arc):
        y = parabola_arc.gamma[:, 0]
        assert np.allclose(parabola_arc.kappa, (1.0 + y ** 2) ** -1.5, rtol=1e-12)
        assert parabola_arc.lambda_min == pytest.approx(17.0 ** -1.5, rel=1e-9)

    def test_chart_attached(self, parabola_arc):
        chart = parabola_arc.chart
        assert parabola_arc.is_graph
        assert chart.y.size == parabola_arc.n
        assert chart.s_of_y[-1] == pytest.approx(parabola_arc.length)
        assert np.allclose(chart.window, 1.0)

    def test_perturbed_window(self, perturbed_arc, perturbed_spec):
        chart = perturbed_arc.chart
        inside = np.abs(chart.y) <= perturbed_spec.halfwidth
        assert np.allclose(chart.window[inside], 1.0)
        assert chart.window[0] == pytest.approx(0.0, abs=1e-15)
        assert chart.y[-1] == pytest.approx(perturbed_spec.domain_halfwidth)

    def test_nonconvex_graph_rejected(self):
        spec = PerturbedParabolaSpec(lam=1.0, a=-1.0, halfwidth=1.0)
        with pytest.raises(GeometryError, match="not strictly convex"):
            build_arc(spec, 257)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            build_arc(ParabolaSpec(mu=1.0, halfwidth=1.0), 16)

    def test_nonpositive_samples_rejected_by_schema(self):
        with pytest.raises(ValidationError):
            CurvatureSamplesSpec(kappa=[1.0, 0.0, 1.0], length=1.0)


class TestK2Condition:
    """Tests for the kappa'' < (3/2) kappa^3 check."""

    def test_circle_holds(self, circle_arc):
        report = check_k2_condition(circle_arc)
        assert report.holds
        assert report.margin == pytest.approx(1.5, rel=1e-6)
        assert report.endpoint_minimum

    def test_interior_minimum(self, oval_arc):
        report = check_k2_condition(oval_arc)
        assert report.holds
        assert report.minima[0] == pytest.approx(0.75, abs=oval_arc.step)
        assert report.margin == pytest.approx(0.5, rel=1e-4)
        assert not report.endpoint_minimum

    def test_sharp_minimum_fails(self):
        s = np.linspace(0.0, 1.5, 201)
        spec = CurvatureSamplesSpec(kappa=(1.0 + 5.0 * (s - 0.75) ** 2).tolist(), length=1.5)
        report = check_k2_condition(build_arc(spec, 1025))
        assert not report.holds
        assert report.margin == pytest.approx(1.5 - 10.0, rel=1e-4)
