"""Tests for arc functions and plane fields."""

import math

import numpy as np
import pytest

from sharp_extension.errors import FieldError
from sharp_extension.src.data.sample_functions import gaussian_on_arc, parabola_gaussian, smooth_bump
from sharp_extension.src.fields.arc_function import (
    ArcFunction,
    as_arclength,
    cap_measure,
    cap_weights,
    inner_product,
    l1_sigma_norm,
    l2_sigma_norm,
    restrict_to_cap,
)
from sharp_extension.src.fields.plane import ComplexField
from sharp_extension.src.models.specs import Cap, PlaneGrid


class TestArcFunction:
    """Tests for ArcFunction."""

    def test_constant_norms(self, circle_arc):
        f = ArcFunction.constant(circle_arc, 2.0)
        assert l2_sigma_norm(f) == pytest.approx(2.0 * math.sqrt(1.5), rel=1e-12)
        assert l1_sigma_norm(f) == pytest.approx(3.0, rel=1e-12)

    def test_gaussian_projection_norm(self, gaussian_parabola_arc):
        f = parabola_gaussian(gaussian_parabola_arc)
        assert f.grid == "y"
        assert f.measure_kind == "projection"
        assert l2_sigma_norm(f) ** 2 == pytest.approx(math.sqrt(math.pi), rel=1e-9)

    def test_shape_mismatch(self, circle_arc):
        with pytest.raises(FieldError):
            ArcFunction(circle_arc, np.ones(circle_arc.n - 1))

    def test_non_finite(self, circle_arc):
        values = np.ones(circle_arc.n)
        values[3] = np.nan
        with pytest.raises(FieldError):
            ArcFunction(circle_arc, values)

    def test_projection_needs_graph_grid(self, circle_arc, parabola_arc):
        with pytest.raises(FieldError):
            ArcFunction(parabola_arc, np.ones(parabola_arc.n), measure_kind="projection")
        with pytest.raises(FieldError):
            ArcFunction.on_graph(circle_arc, np.ones_like)

    def test_nonnegativity(self, circle_arc):
        f = ArcFunction.constant(circle_arc, 1.0)
        assert f.is_nonnegative()
        assert not f.scaled(1j).is_nonnegative()
        with pytest.raises(FieldError):
            f.scaled(-1.0).require_nonnegative("test")

    def test_inner_product_hermitian(self, circle_arc):
        f = gaussian_on_arc(circle_arc, 0.5, 0.2).scaled(1.0 + 2.0j)
        g = smooth_bump(circle_arc, 0.8, 0.4)
        assert inner_product(f, g) == pytest.approx(np.conj(inner_product(g, f)), rel=1e-14)
        assert inner_product(f, f).real == pytest.approx(l2_sigma_norm(f) ** 2, rel=1e-14)

    def test_inner_product_needs_common_measure(self, circle_arc, parabola_arc):
        with pytest.raises(FieldError):
            inner_product(ArcFunction.constant(circle_arc), ArcFunction.constant(parabola_arc))

    def test_refined_keeps_mass(self, circle_arc):
        f = ArcFunction.constant(circle_arc, 1.0)
        assert f.refined(1).total_variation == pytest.approx(1.5, rel=1e-12)
        assert f.refined(3, rule="trapezoid").total_variation == pytest.approx(1.5, rel=1e-12)

    def test_to_frame(self, parabola_arc):
        f = ArcFunction.on_graph(parabola_arc, np.cos)
        frame = f.to_frame()
        assert list(frame.columns) == ["y", "s", "re", "im"]
        assert len(frame) == parabola_arc.n


class TestMeasures:
    """Tests for measure conversion and caps."""

    def test_projection_to_arclength(self, parabola_arc):
        f = ArcFunction.on_graph(parabola_arc, lambda y: np.exp(-y ** 2), measure_kind="projection")
        g = as_arclength(f)
        assert g.grid == "s"
        total_f = np.sum(f.weights * f.values).real
        total_g = np.sum(g.weights * g.values).real
        assert total_g == pytest.approx(total_f, rel=1e-5)

    def test_graph_arclength_measure(self, parabola_arc):
        f = ArcFunction.on_graph(parabola_arc, np.ones_like, measure_kind="arclength")
        assert l1_sigma_norm(f) == pytest.approx(parabola_arc.length, rel=1e-9)

    def test_cap_measure(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        assert cap_measure(f, Cap(center=0.75, radius=0.25)) == pytest.approx(0.5, abs=2.0 * circle_arc.step)

    def test_restrict_to_cap(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        g = restrict_to_cap(f, Cap(center=0.2, radius=0.1))
        inside = np.abs(circle_arc.s_grid - 0.2) < 0.1
        assert np.all(g.values[inside] == 1.0)
        assert np.all(g.values[~inside] == 0.0)

    @pytest.mark.parametrize("k", [3, 64, 100, 511])
    def test_cap_with_edges_on_nodes(self, circle_arc, k):
        f = ArcFunction.constant(circle_arc)
        cap = Cap(center=0.75, radius=k * circle_arc.step)
        assert cap_measure(f, cap) == pytest.approx(2.0 * k * circle_arc.step, rel=1e-12)
        g = restrict_to_cap(f, cap)
        assert np.sum(g.weights * g.values).real == pytest.approx(2.0 * k * circle_arc.step, rel=1e-12)

    def test_edge_samples_half_weight(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        weights = cap_weights(f, Cap(center=0.75, radius=4 * circle_arc.step))
        assert np.count_nonzero(weights == 1.0) == 7
        assert np.flatnonzero(weights == 0.5).tolist() == [508, 516]
        assert np.count_nonzero(weights) == 9

    def test_restrict_off_arc(self, circle_arc):
        with pytest.raises(FieldError):
            restrict_to_cap(ArcFunction.constant(circle_arc), Cap(center=2.0, radius=0.1))


class TestComplexField:
    """Tests for ComplexField."""

    @pytest.fixture
    def grid(self):
        return PlaneGrid(x_min=-1.0, x_max=1.0, t_min=0.0, t_max=2.0, nx=5, nt=3)

    def test_shape_checked(self, grid):
        with pytest.raises(FieldError):
            ComplexField(grid, np.zeros((3, 5)))

    def test_total_and_frame(self, grid):
        field = ComplexField(grid, np.ones((5, 3)) + 1j)
        assert field.total() == pytest.approx(15 * 0.5 * 1.0)
        frame = field.to_frame()
        assert len(frame) == 15
        assert frame["x"].iloc[0] == -1.0 and frame["t"].iloc[1] == 1.0
        assert np.all(frame["im"] == 1.0)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            PlaneGrid(x_min=1.0, x_max=1.0, t_min=0.0, t_max=1.0, nx=3, nt=3)
