"""Tests for deposition, pair and triple convolutions, and the singular bilinear form."""

import math

import numpy as np
import pytest

from sharp_extension.errors import FieldError
from sharp_extension.src.convolutions.convolutions import (
    bilinear_form,
    cap_indicator,
    l32_norm_pair,
    l6_norm_convolution,
    pair_convolution_density,
    triple_cap_norm,
    triple_convolution_density,
)
from sharp_extension.src.convolutions.deposition import deposit, deposit_on_lattice
from sharp_extension.src.data.sample_functions import regression_family, smooth_bump
from sharp_extension.src.extension.extension_operator import l6_norm_direct
from sharp_extension.src.fields.arc_function import ArcFunction, l1_sigma_norm
from sharp_extension.src.models.specs import Cap, PlaneGrid


class TestDeposition:
    """Tests for cloud-in-cell deposition."""

    def test_mass_preserved(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(0.0, 1.0, size=(500, 2))
        masses = rng.uniform(0.5, 1.5, size=500)
        nodes = deposit_on_lattice(points, masses, 0.05)
        assert nodes.masses.sum() == pytest.approx(masses.sum(), rel=1e-13)
        assert nodes.l2_density_norm() > 0.0

    def test_node_point_hits_one_node(self):
        grid = deposit(np.array([[0.2, 0.3]]), np.array([2.0]), np.zeros(2), (0.1, 0.1), (5, 5))
        assert grid[2, 3] == pytest.approx(2.0)
        assert np.count_nonzero(np.abs(grid) > 1e-12) == 1

    def test_complex_masses(self):
        grid = deposit(np.array([[0.15, 0.15]]), np.array([1.0 + 1.0j]), np.zeros(2), (0.1, 0.1), (4, 4))
        assert grid.sum() == pytest.approx(1.0 + 1.0j)
        assert grid[1, 1] == pytest.approx(0.25 + 0.25j)

    def test_outside_grid(self):
        with pytest.raises(FieldError):
            deposit(np.array([[1.0, 0.0]]), np.array([1.0]), np.zeros(2), (0.1, 0.1), (3, 3))


class TestTripleConvolution:
    """Tests for sigma * sigma * sigma and the Plancherel route."""

    def test_total_mass(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        density = triple_convolution_density(f, f, f)
        assert density.masses.sum() == pytest.approx(1.5 ** 3, rel=1e-10)

    def test_support_origin(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        density = triple_convolution_density(f, f, f, spacing=0.02)
        u, v = density.node_coordinates()
        assert u[0] <= 0.0 and v[0] <= 0.0
        assert u[-1] >= 3.0 * math.sin(1.5)

    def test_empty_support(self, circle_arc):
        zero = ArcFunction.constant(circle_arc, 0.0)
        one = ArcFunction.constant(circle_arc)
        assert triple_convolution_density(zero, one, one).l2_density_norm() == 0.0

    def test_cap_norm_grows_with_cap(self, circle_arc):
        small = triple_cap_norm(circle_arc, [Cap(center=0.75, radius=0.1)] * 3, spacing=0.01)
        large = triple_cap_norm(circle_arc, [Cap(center=0.75, radius=0.3)] * 3, spacing=0.01)
        assert 0.0 < small < large

    def test_separated_caps_triple_less(self, circle_arc):
        a = Cap(center=0.2, radius=0.05)
        near = triple_cap_norm(circle_arc, [a, a, a], spacing=0.004)
        far = triple_cap_norm(circle_arc, [a, a, Cap(center=1.3, radius=0.05)], spacing=0.004)
        assert 0.0 < far < 0.5 * near

    def test_convolution_route_real_only(self, circle_arc):
        f = smooth_bump(circle_arc, 0.75, 0.3)
        with pytest.raises(FieldError):
            l6_norm_convolution(f.scaled(1j))

    def test_convolution_route_uses_modulus(self, circle_arc):
        f = smooth_bump(circle_arc, 0.75, 0.3)
        value = l6_norm_convolution(f, spacing=0.02)
        assert value > 0.0
        assert l6_norm_convolution(f.scaled(-1.0), spacing=0.02) == pytest.approx(value, rel=1e-12)

    @pytest.mark.slow
    def test_two_routes_agree(self, circle_arc):
        for f in regression_family(circle_arc, size=3):
            direct = l6_norm_direct(f).value
            via_convolution = l6_norm_convolution(f)
            assert via_convolution == pytest.approx(direct, rel=0.02)


class TestPairConvolution:
    """Tests for the pair convolution density and its L^(3/2) norm."""

    @pytest.fixture
    def grid(self):
        return PlaneGrid(x_min=-0.1, x_max=2.1, t_min=-0.1, t_max=2.0, nx=64, nt=64)

    def test_total_mass(self, circle_arc, grid):
        f = ArcFunction.constant(circle_arc)
        field = pair_convolution_density(f, f, grid)
        assert field.total() == pytest.approx(1.5 ** 2, rel=1e-9)
        assert np.all(field.values.real >= 0.0)

    def test_symmetric(self, circle_arc, grid):
        f = smooth_bump(circle_arc, 0.4, 0.3)
        g = smooth_bump(circle_arc, 1.0, 0.4)
        fg = pair_convolution_density(f, g, grid).values.real
        gf = pair_convolution_density(g, f, grid).values.real
        assert np.allclose(fg, gf, rtol=1e-9, atol=1e-12 * np.max(fg))

    def test_total_mass_of_distinct_inputs(self, circle_arc, grid):
        f = smooth_bump(circle_arc, 0.4, 0.3)
        g = smooth_bump(circle_arc, 1.0, 0.4)
        field = pair_convolution_density(f, g, grid)
        assert field.total() == pytest.approx(l1_sigma_norm(f) * l1_sigma_norm(g), rel=1e-4)

    def test_grid_must_cover(self, circle_arc):
        f = ArcFunction.constant(circle_arc)
        small = PlaneGrid(x_min=0.0, x_max=1.0, t_min=0.0, t_max=1.0, nx=16, nt=16)
        with pytest.raises(FieldError):
            pair_convolution_density(f, f, small)

    def test_complex_input_rejected(self, circle_arc, grid):
        f = ArcFunction.constant(circle_arc)
        with pytest.raises(FieldError):
            pair_convolution_density(f.scaled(1j), f, grid)

    def test_l32_symmetric_and_homogeneous(self, circle_arc):
        f = smooth_bump(circle_arc, 0.4, 0.3)
        g = smooth_bump(circle_arc, 1.0, 0.4)
        value = l32_norm_pair(f, g)
        assert value > 0.0
        assert l32_norm_pair(g, f) == pytest.approx(value, rel=1e-12)
        assert l32_norm_pair(f.scaled(2.0), g) == pytest.approx(2.0 * value, rel=1e-12)

    def test_l32_zero_and_negative(self, circle_arc):
        f = smooth_bump(circle_arc, 0.4, 0.3)
        assert l32_norm_pair(f, ArcFunction.constant(circle_arc, 0.0)) == 0.0
        with pytest.raises(FieldError):
            l32_norm_pair(f.scaled(-1.0), f)

    def test_separated_caps_interact_less(self, circle_arc):
        near = l32_norm_pair(cap_indicator(circle_arc, Cap(center=0.2, radius=0.1)),
                             cap_indicator(circle_arc, Cap(center=0.4, radius=0.1)))
        far = l32_norm_pair(cap_indicator(circle_arc, Cap(center=0.2, radius=0.1)),
                            cap_indicator(circle_arc, Cap(center=1.3, radius=0.1)))
        assert far < near


class TestBilinearForm:
    """Tests for the |x - x'|^(-alpha) bilinear form."""

    def test_unit_interval(self):
        n = 1001
        ones = np.ones(n)
        assert bilinear_form(ones, ones, 1.0 / (n - 1), 0.5) == pytest.approx(8.0 / 3.0, rel=1e-3)

    def test_general_alpha(self):
        n = 801
        ones = np.ones(n)
        alpha = 0.3
        expected = 2.0 / ((1.0 - alpha) * (2.0 - alpha))
        assert bilinear_form(ones, ones, 1.0 / (n - 1), alpha) == pytest.approx(expected, rel=1e-3)

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            bilinear_form(np.ones(5), np.ones(5), 0.25, 1.0)
