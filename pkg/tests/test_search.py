"""Tests for the extremizer ascent and the sequence diagnostics."""

import numpy as np
import pytest

from sharp_extension.errors import FieldError
from sharp_extension.src.data.sample_functions import (
    concentrating_sequence,
    graph_bump,
    parabola_gaussian,
    smooth_bump,
)
from sharp_extension.src.extension.gaussians import foschi_constant
from sharp_extension.src.fields.arc_function import inner_product, l2_sigma_norm
from sharp_extension.src.models.specs import SearchParams
from sharp_extension.src.search.diagnostics import sequence_diagnostics
from sharp_extension.src.search.extremizer_search import ascent_step, search


def _unit(f):
    return f.scaled(1.0 / l2_sigma_norm(f))


class TestAscentStep:
    """Tests for one damped fixed-point step."""

    def test_gaussian_nearly_fixed(self, gaussian_parabola_arc, coarse_l6):
        f = _unit(parabola_gaussian(gaussian_parabola_arc))
        g = ascent_step(f, 1.0, coarse_l6)
        assert 1.0 - inner_product(g, f).real <= 5e-3

    def test_bump_moves_more_than_gaussian(self, gaussian_parabola_arc, coarse_l6):
        gauss = _unit(parabola_gaussian(gaussian_parabola_arc))
        bump = _unit(graph_bump(gaussian_parabola_arc, 1.0))
        gauss_moved = 1.0 - inner_product(ascent_step(gauss, 1.0, coarse_l6), gauss).real
        bump_moved = 1.0 - inner_product(ascent_step(bump, 1.0, coarse_l6), bump).real
        assert bump_moved > gauss_moved

    def test_unit_norm_and_nonnegative(self, parabola_arc, coarse_l6):
        f = graph_bump(parabola_arc, 2.0)
        g = ascent_step(f, 0.5, coarse_l6)
        assert l2_sigma_norm(g) == pytest.approx(1.0, rel=1e-12)
        assert np.all(g.real >= 0.0)

    def test_preserves_reflection_symmetry(self, parabola_arc, coarse_l6):
        g = ascent_step(graph_bump(parabola_arc, 2.0), 1.0, coarse_l6)
        assert np.allclose(g.values[::-1], g.values, rtol=0.0, atol=1e-9 * np.max(np.abs(g.values)))

    @pytest.mark.parametrize("damping", [0.0, -0.5, 1.5])
    def test_damping_range(self, parabola_arc, damping):
        with pytest.raises(ValueError):
            ascent_step(graph_bump(parabola_arc, 2.0), damping)

    def test_rejects_negative(self, parabola_arc):
        with pytest.raises(FieldError):
            ascent_step(graph_bump(parabola_arc, 2.0).scaled(-1.0), 1.0)


class TestSearch:
    """Tests for the damped ascent loop."""

    def test_best_is_maximum_of_trace(self, parabola_arc, coarse_l6):
        result = search(graph_bump(parabola_arc, 2.0), SearchParams(max_iters=3, l6=coarse_l6))
        assert result.c_lower == max(row.rayleigh for row in result.trace)
        assert result.trace[0].iteration == 0
        assert len(result.trace) <= 4
        assert l2_sigma_norm(result.best) == pytest.approx(1.0, rel=1e-12)

    def test_zero_iterations(self, parabola_arc, coarse_l6):
        result = search(graph_bump(parabola_arc, 2.0), SearchParams(max_iters=0, l6=coarse_l6))
        assert len(result.trace) == 1
        assert len(result.iterates) == 1

    def test_zero_start(self, parabola_arc):
        with pytest.raises(FieldError):
            search(graph_bump(parabola_arc, 2.0).scaled(0.0), SearchParams(max_iters=1))

    @pytest.mark.slow
    def test_reaches_parabola_constant(self, gaussian_parabola_arc):
        result = search(graph_bump(gaussian_parabola_arc, 2.0), SearchParams())
        target = foschi_constant(1.0)
        assert len(result.trace) <= 101
        assert result.c_lower >= target - 2e-3
        assert result.c_lower <= target * (1.0 + 1e-3)


class TestSequenceDiagnostics:
    """Tests for the diffuse-versus-concentrating classification."""

    def test_concentrating_at_minimum(self, oval_arc):
        report = sequence_diagnostics(concentrating_sequence(oval_arc, 0.75))
        assert report.classification == "concentrating"
        assert report.concentration.at_curvature_minimum
        assert len(report.tail_height) == len(report.R_values)

    def test_concentrating_elsewhere(self, oval_arc):
        report = sequence_diagnostics(concentrating_sequence(oval_arc, 0.3))
        assert report.classification == "concentrating"
        assert not report.concentration.at_curvature_minimum

    def test_diffuse(self, oval_arc):
        fs = [smooth_bump(oval_arc, 0.75, 0.6) for _ in range(3)]
        assert sequence_diagnostics(fs).classification == "diffuse"

    def test_needs_three_functions(self, oval_arc):
        with pytest.raises(ValueError):
            sequence_diagnostics(concentrating_sequence(oval_arc, 0.75, (8.0, 16.0)))
