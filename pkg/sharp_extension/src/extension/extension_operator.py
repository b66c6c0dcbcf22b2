"""Extension operator f -> (f sigma)^ and its L6 norm.

Point measures are evaluated blockwise: targets are split into blocks whose
size depends only on the source count and ``settings.block_elements``, so the
values are identical for every worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...config import settings
from ...errors import FieldError, NumericalFailure
from ..fields.arc_function import ArcFunction, PointMeasure, l2_sigma_norm
from ..fields.plane import ComplexField
from ..geometry.quadrature import gauss_legendre_panels
from ..models.results import L6Estimate
from ..models.specs import L6Control, PlaneGrid
from .gaussians import foschi_constant

logger = logging.getLogger(__name__)


def evaluate_measure(
    measure: PointMeasure,
    targets: np.ndarray,
    sign: float = -1.0,
    threads: Optional[int] = None
) -> np.ndarray:
    """
    Exponential sums sum_j m_j exp(sign * i * p . x_j) at every target p.

    Args:
        measure: Sources x_j with masses m_j
        targets: Points p, shape (k, 2)
        sign: -1 for the extension operator, +1 for its adjoint
        threads: Worker count (defaults to settings.threads)

    Returns:
        Complex array of length k
    """
    targets = np.asarray(targets, dtype=float)
    if measure.size == 0 or targets.shape[0] == 0:
        return np.zeros(targets.shape[0], dtype=complex)

    rows = max(1, settings.block_elements // measure.size)
    starts = list(range(0, targets.shape[0], rows))
    positions_t = measure.positions.T
    masses = measure.masses

    def block(start: int) -> np.ndarray:
        phase = targets[start:start + rows] @ positions_t
        return np.exp((sign * 1j) * phase) @ masses

    parallel = threads > 1 if threads else settings.is_parallel
    if parallel and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads or settings.threads) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(start) for start in starts]
    return np.concatenate(parts)


def phase_step(measure: PointMeasure, reach_x: float, reach_t: float) -> float:
    """
    Largest phase increment between consecutive samples of a measure for
    frequencies |x| <= reach_x, |t| <= reach_t, over the support only.
    """
    if measure.size < 2:
        return 0.0
    active = np.abs(measure.masses) > 0.0
    keep = active[1:] | active[:-1]
    if not np.any(keep):
        return 0.0
    d = np.abs(np.diff(measure.positions, axis=0))[keep]
    return float(np.max(reach_x * d[:, 0] + reach_t * d[:, 1]))


def extend(f: ArcFunction, grid: PlaneGrid, threads: Optional[int] = None) -> ComplexField:
    """
    Evaluate (f sigma)^(x, t) on every node of a plane grid.

    Args:
        f: Arc function
        grid: Plane grid
        threads: Worker count

    Returns:
        ComplexField; ``under_resolved`` is set when the phase increment
        between consecutive samples, max |(x,t)| * h, exceeds the threshold
    """
    measure = f.point_measure()
    values = evaluate_measure(measure, grid.nodes(), sign=-1.0, threads=threads)
    step = phase_step(
        measure,
        max(abs(grid.x_min), abs(grid.x_max)),
        max(abs(grid.t_min), abs(grid.t_max)),
    )
    under = step > settings.resolution_threshold
    if under:
        logger.warning(f"extend: oscillation under-resolved on {f.arc.label} (phase step {step:.3f})")
    return ComplexField(grid, values.reshape(grid.nx, grid.nt), under_resolved=under)


@dataclass(frozen=True, eq=False)
class PlaneQuadrature:
    """Polar quadrature of the disk of radius R3, split at R1 and R2."""

    points: np.ndarray
    weights: np.ndarray
    segment: np.ndarray
    control: L6Control


def plane_quadrature(ctrl: Optional[L6Control] = None) -> PlaneQuadrature:
    """
    Gauss-Legendre panels in r (ending exactly at each radius) times the
    trapezoid rule in the angle, mapped through (x, t) = (sx X, st T).
    """
    ctrl = ctrl or L6Control()
    r, wr, segment = gauss_legendre_panels((0.0,) + tuple(ctrl.radii), ctrl.panel_width, ctrl.panel_nodes)
    n_angle = ctrl.angle_nodes
    omega = 2.0 * np.pi * np.arange(n_angle) / n_angle
    sx, st = ctrl.scale

    rr = np.repeat(r, n_angle)
    oo = np.tile(omega, r.size)
    points = np.column_stack([sx * rr * np.cos(oo), st * rr * np.sin(oo)])
    weights = np.repeat(wr * r, n_angle) * (2.0 * np.pi / n_angle) * sx * st
    return PlaneQuadrature(points, weights, np.repeat(segment, n_angle), ctrl)


def _extrapolate(partial: np.ndarray, radii: Tuple[float, float, float]) -> Tuple[float, float, float, float]:
    """Fit I(R) = I_inf - c/R; returns (I_inf, c, residual, two-radius Richardson value)."""
    radii = np.asarray(radii, dtype=float)
    design = np.column_stack([np.ones(3), -1.0 / radii])
    (i_inf, c), *_ = np.linalg.lstsq(design, partial, rcond=None)
    residual = float(np.linalg.norm(design @ np.array([i_inf, c]) - partial))
    richardson = (radii[2] * partial[2] - radii[1] * partial[1]) / (radii[2] - radii[1])
    return float(i_inf), float(c), residual, float(richardson)


def _zero_estimate(ctrl: L6Control) -> L6Estimate:
    return L6Estimate(
        value=0.0, error_estimate=0.0, truncation_gap=0.0,
        radii=tuple(ctrl.radii), partial_integrals=(0.0, 0.0, 0.0),
        extrapolated_integral=0.0, tail_coefficient=0.0,
    )


def estimate_from_values(quad: PlaneQuadrature, values: np.ndarray, under_resolved: bool = False) -> L6Estimate:
    """
    L6 estimate from extension values at the nodes of a plane quadrature.

    Returns:
        L6Estimate whose error estimate is the larger of the extrapolation
        fit error and the gap to the norm truncated at the widest radius

    Raises:
        NumericalFailure: truncated integrals decrease, or their increments
            grow instead of decaying like 1/R
    """
    ctrl = quad.control
    density = np.abs(values) ** 6 * quad.weights
    partial = np.array([np.sum(density[quad.segment <= k]) for k in range(3)])
    if partial[-1] == 0.0:
        return _zero_estimate(ctrl)

    d1, d2 = partial[1] - partial[0], partial[2] - partial[1]
    r1, r2, r3 = ctrl.radii
    expected_ratio = (1.0 / r2 - 1.0 / r3) / (1.0 / r1 - 1.0 / r2)
    if d1 < 0.0 or d2 < 0.0 or d2 > 4.0 * expected_ratio * d1 + 1e-12 * partial[-1]:
        diagnostics = {"radii": list(ctrl.radii), "partial_integrals": partial.tolist()}
        logger.error(f"L6 truncated integrals do not settle: {partial.tolist()}")
        raise NumericalFailure(
            "truncated L6 integrals are not monotone with decaying increments; "
            "the plane quadrature is under-resolved",
            diagnostics,
        )

    i_inf, c, residual, richardson = _extrapolate(partial, ctrl.radii)
    i_inf = max(i_inf, float(partial[-1]))
    value = i_inf ** (1.0 / 6.0)
    spread = abs(value - max(richardson, 0.0) ** (1.0 / 6.0))
    fit_error = spread + value / (6.0 * i_inf) * residual
    gap = abs(partial[-1] ** (1.0 / 6.0) - value)
    return L6Estimate(
        value=value,
        error_estimate=max(fit_error, gap),
        truncation_gap=gap,
        fit_error=fit_error,
        radii=tuple(ctrl.radii),
        partial_integrals=tuple(float(p) for p in partial),
        extrapolated_integral=i_inf,
        tail_coefficient=c,
        under_resolved=under_resolved,
    )


@dataclass(frozen=True, eq=False)
class PlaneSample:
    """Extension values of a (centered) point measure on a plane quadrature."""

    quad: PlaneQuadrature
    values: np.ndarray
    center: np.ndarray
    under_resolved: bool


def sample_on_quadrature(
    measure: PointMeasure,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None
) -> PlaneSample:
    """
    Evaluate the extension of a point measure on the L6 plane quadrature.

    The measure is translated to be centered at the origin first; this only
    multiplies the extension by a unimodular phase.
    """
    quad = plane_quadrature(ctrl)
    support = measure.support()
    center = support.center if support.size else np.zeros(2)
    shifted = PointMeasure(support.positions - center, support.masses)
    values = evaluate_measure(shifted, quad.points, sign=-1.0, threads=threads)
    r3 = quad.control.radii[-1]
    step = phase_step(measure, quad.control.scale[0] * r3, quad.control.scale[1] * r3)
    under = step > settings.resolution_threshold
    if under:
        logger.warning(f"L6 quadrature under-resolved: phase step {step:.3f} per sample")
    return PlaneSample(quad, values, center, under)


def l6_norm_of_measure(
    measure: PointMeasure,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None
) -> L6Estimate:
    """L6 norm of the extension of a point measure with c/R tail extrapolation."""
    ctrl = ctrl or L6Control()
    if measure.size == 0 or not np.any(measure.masses):
        return _zero_estimate(ctrl)
    sample = sample_on_quadrature(measure, ctrl, threads=threads)
    return estimate_from_values(sample.quad, sample.values, sample.under_resolved)


def l6_norm_direct(
    f: ArcFunction,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None
) -> L6Estimate:
    """
    ||(f sigma)^||_6 by polar quadrature on three disks and c/R extrapolation.

    Args:
        f: Arc function
        ctrl: Radii and plane resolution
        threads: Worker count

    Returns:
        L6Estimate with the extrapolated value, its error estimate and the
        gap to the largest truncated disk
    """
    ctrl = ctrl or L6Control()
    estimate = l6_norm_of_measure(f.point_measure(), ctrl, threads=threads)
    logger.debug(
        f"L6 on {f.arc.label}: {estimate.value:.8g} "
        f"(error {estimate.error_estimate:.2e}, gap {estimate.truncation_gap:.2e})"
    )
    return estimate


def adjoint_extend(
    sample: PlaneSample,
    field: np.ndarray,
    template: ArcFunction,
    threads: Optional[int] = None,
    extrapolate: bool = True
) -> np.ndarray:
    """
    Re sum_k W_k G_k exp(+i p_k . gamma(s)) at the samples of ``template``.

    ``field`` holds G at the nodes of ``sample.quad``; positions are shifted
    by the same center used to compute the sample. The sums over the disks
    of radius R1, R2, R3 are extrapolated pointwise with the same c/R tail
    model as the L6 integral unless ``extrapolate`` is False.
    """
    quad = sample.quad
    targets = template.positions - sample.center
    parts = []
    for k in range(3):
        on = quad.segment == k
        sources = PointMeasure(quad.points[on], field[on] * quad.weights[on])
        parts.append(evaluate_measure(sources, targets, sign=1.0, threads=threads).real)
    partial = np.cumsum(parts, axis=0)
    if not extrapolate:
        return partial[-1]
    radii = np.asarray(quad.control.radii, dtype=float)
    design = np.column_stack([np.ones(3), -1.0 / radii])
    return (np.linalg.pinv(design) @ partial)[0]


def rayleigh_with_error(
    f: ArcFunction,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None,
    check_envelope: bool = True
) -> Tuple[float, L6Estimate]:
    """Rayleigh quotient with the L6 estimate it came from."""
    norm = l2_sigma_norm(f)
    if norm == 0.0:
        logger.error("rayleigh quotient requested for the zero function")
        raise FieldError("rayleigh quotient is undefined for f = 0")
    estimate = l6_norm_direct(f, ctrl, threads=threads)
    quotient = estimate.value / norm
    if check_envelope:
        check_tomas_stein_envelope(quotient, f.arc.lambda_min)
    return quotient, estimate


def rayleigh(f: ArcFunction, ctrl: Optional[L6Control] = None, threads: Optional[int] = None) -> float:
    """||(f sigma)^||_6 / ||f||_{L2(sigma)}."""
    return rayleigh_with_error(f, ctrl, threads)[0]


def tomas_stein_envelope(lambda_min: float) -> float:
    """A-priori upper envelope envelope_factor * C_F[lambda_min]."""
    return settings.envelope_factor * foschi_constant(lambda_min)


def check_tomas_stein_envelope(quotient: float, lambda_min: float) -> bool:
    bound = tomas_stein_envelope(lambda_min)
    if quotient > bound:
        logger.warning(f"rayleigh quotient {quotient:.6g} exceeds the envelope {bound:.6g}")
        return False
    return True


def modulate(f: ArcFunction, x0: float, t0: float) -> ArcFunction:
    """f(s) exp(-i (x0, t0) . gamma(s))."""
    phase = f.positions @ np.array([x0, t0])
    return f.with_values(f.values * np.exp(-1j * phase))


def galilean_shift(f: ArcFunction, c: float) -> ArcFunction:
    """f(y) exp(i c y) on the graph grid."""
    if f.grid != "y":
        raise FieldError("galilean shift acts on graph-grid functions")
    return f.with_values(f.values * np.exp(1j * c * f.arc.chart.y))

