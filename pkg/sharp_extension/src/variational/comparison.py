"""Strict comparison of a searched lower bound for C[Gamma] with C_F[lambda]."""

import dataclasses
import logging
from typing import Optional, Tuple

import numpy as np

from ..data.sample_functions import transplant_gaussian
from ..extension.gaussians import foschi_constant
from ..fields.arc_function import ArcFunction
from ..geometry.arc_geometry import ConvexArc, check_k2_condition
from ..models.results import CompareReport
from ..models.specs import PerturbedParabolaSpec, SearchParams
from ..search.extremizer_search import search
from .xi import trial_function

logger = logging.getLogger(__name__)

TRIAL_EPSILON = 0.15
STRICT_FACTOR = 3.0


def strict_margin(c_lower: float, c_f: float, error_estimate: float) -> Tuple[float, bool]:
    """Margin C_hat - C_F and whether it exceeds STRICT_FACTOR times the error estimate."""
    margin = c_lower - c_f
    return margin, bool(margin > STRICT_FACTOR * error_estimate)


def aligned(arc: ConvexArc, s0: float) -> ConvexArc:
    """The arc rotated so that its tangent at s0 points along the x axis."""
    angle = float(arc.theta_at(s0))
    c, s = np.cos(angle), np.sin(angle)
    rotation = np.array([[c, s], [-s, c]])
    return dataclasses.replace(arc, gamma=arc.gamma @ rotation.T, theta=arc.theta - angle)


def _seed(arc: ConvexArc, s0: float, eps: float) -> ArcFunction:
    spec = arc.chart.spec if arc.chart is not None else None
    if isinstance(spec, PerturbedParabolaSpec):
        f0 = trial_function(spec, eps, arc=arc)
    else:
        f0 = transplant_gaussian(arc, s0, 1.0 / eps)
    return f0.with_values(np.maximum(f0.real, 0.0))


def compare_constants(
    arc: ConvexArc,
    params: Optional[SearchParams] = None,
    eps: float = TRIAL_EPSILON,
    reference_lambda: Optional[float] = None,
    threads: Optional[int] = None
) -> CompareReport:
    """
    Lower bound for C[Gamma] by ascent from a trial function concentrated at
    the curvature minimum, compared with C_F[lambda].

    Perturbed parabolas are seeded with the trial family f_eps and compared
    against their vertex curvature; other arcs are rotated so that the
    tangent at the curvature minimum is horizontal and seeded with a
    transplanted Gaussian of width eps. The plane rule is stretched by
    (1/eps, 1/eps^2) to follow the concentrated extension.

    Args:
        arc: Arc (expected to satisfy the kappa'' < (3/2) kappa^3 condition)
        params: Ascent controls; their L6 scale is replaced
        eps: Concentration of the seed
        reference_lambda: Curvature for C_F (defaults to the vertex
            curvature of a perturbed parabola, else lambda_min)
        threads: Worker count

    Returns:
        CompareReport; strict when the margin exceeds three times the L6
        error estimate of the best iterate
    """
    params = params or SearchParams()
    k2 = check_k2_condition(arc)
    if not k2.holds:
        logger.warning(f"{arc.label}: kappa'' < (3/2) kappa^3 fails at the minimum (margin {k2.margin:.4g})")

    spec = arc.chart.spec if arc.chart is not None else None
    if reference_lambda is None:
        reference_lambda = spec.lam if isinstance(spec, PerturbedParabolaSpec) else arc.lambda_min
    s0 = k2.minima[0]
    if arc.chart is None:
        arc = aligned(arc, s0)

    ctrl = params.l6.model_copy(update={"scale": (1.0 / eps, 1.0 / eps ** 2)})
    result = search(_seed(arc, s0, eps), params.model_copy(update={"l6": ctrl}), threads=threads)

    c_f = foschi_constant(reference_lambda)
    margin, strict = strict_margin(result.c_lower, c_f, result.error_estimate)
    logger.info(
        f"compare on {arc.label}: C_hat={result.c_lower:.10g}, C_F={c_f:.10g}, "
        f"margin={margin:.3e}, error={result.error_estimate:.3e}, strict={strict}"
    )
    return CompareReport(
        lambda_min=arc.lambda_min,
        lambda_reference=reference_lambda,
        C_F_lambda=c_f,
        C_hat_gamma_lower=result.c_lower,
        error_estimate=result.error_estimate,
        margin=margin,
        strict=strict,
        trial_epsilon=eps,
        iterations=len(result.trace) - 1,
    )
