"""Fixed-point ascent on the Rayleigh quotient ||(f sigma)^||_6 / ||f||_2 over nonnegative f."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from ...config import settings
from ...errors import FieldError, NumericalFailure
from ..extension.extension_operator import (
    PlaneSample,
    adjoint_extend,
    check_tomas_stein_envelope,
    estimate_from_values,
    sample_on_quadrature,
)
from ..fields.arc_function import ArcFunction, l2_sigma_norm
from ..models.results import L6Estimate, SearchTraceRow
from ..models.specs import L6Control, SearchParams

logger = logging.getLogger(__name__)


def _normalized(f: ArcFunction) -> ArcFunction:
    norm = l2_sigma_norm(f)
    if norm == 0.0:
        logger.error("ascent requested for the zero function")
        raise FieldError("the ascent needs a nonzero starting function")
    return f.scaled(1.0 / norm)


def _evaluate(
    f: ArcFunction,
    ctrl: Optional[L6Control],
    threads: Optional[int]
) -> Tuple[PlaneSample, L6Estimate]:
    sample = sample_on_quadrature(f.point_measure(), ctrl, threads=threads)
    return sample, estimate_from_values(sample.quad, sample.values, sample.under_resolved)


def ascent_step(
    f: ArcFunction,
    damping: float,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None,
    sample: Optional[PlaneSample] = None
) -> ArcFunction:
    """
    One damped fixed-point step for the Euler-Lagrange equation.

    With F = (f sigma)^ on the L6 plane rule, g = Re E*(|F|^4 F) is pulled
    back to the samples of f, clamped at 0, normalized, blended as
    (1 - damping) f + damping g / ||g|| and renormalized.

    Args:
        f: Nonnegative, nonzero arc function
        damping: Blend weight in (0, 1]
        ctrl: Plane quadrature shared by the objective and its pullback
        threads: Worker count
        sample: Precomputed extension of f on the plane rule of ``ctrl``

    Returns:
        Nonnegative ArcFunction with unit L2 norm

    Raises:
        FieldError: f is negative, complex or zero
        NumericalFailure: the clamped pullback vanishes identically
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    f.require_nonnegative("ascent_step")
    f = _normalized(f)
    if sample is None:
        sample = sample_on_quadrature(f.point_measure(), ctrl, threads=threads)

    F = sample.values
    g = np.maximum(adjoint_extend(sample, np.abs(F) ** 4 * F, f, threads=threads), 0.0)
    g_norm = float(np.sqrt(np.sum(f.weights * g ** 2)))
    if g_norm == 0.0:
        logger.error("clamped pullback vanished; degenerate iterate")
        raise NumericalFailure("ascent pullback is identically zero after projection", {"samples": f.arc.n})

    blended = (1.0 - damping) * f.real + damping * g / g_norm
    return _normalized(f.with_values(blended))


@dataclass(frozen=True, eq=False)
class SearchResult:
    """Best iterate, its Rayleigh quotient with the L6 error, and the trace."""

    best: ArcFunction
    c_lower: float
    error_estimate: float
    trace: List[SearchTraceRow] = field(default_factory=list)
    iterates: List[ArcFunction] = field(default_factory=list)


def search(
    f0: ArcFunction,
    params: Optional[SearchParams] = None,
    threads: Optional[int] = None
) -> SearchResult:
    """
    Damped ascent from f0, keeping the best iterate ever seen.

    Damping starts at params.damping and halves (down to the configured
    floor) whenever a step lowers the quotient; such a step is rejected
    unless the damping is already at the floor. The run stops after
    max_iters steps or once the quotient moves by less than stall_tol
    for ``settings.stall_window`` consecutive steps.

    Args:
        f0: Nonnegative nonzero starting function
        params: Iteration controls and the L6 plane rule
        threads: Worker count

    Returns:
        SearchResult; ``c_lower`` = rayleigh(best) and ``iterates`` holds
        every accepted iterate
    """
    params = params or SearchParams()
    ctrl = params.l6
    f0.require_nonnegative("search")
    f = _normalized(f0)
    sample, estimate = _evaluate(f, ctrl, threads)
    quotient = estimate.value
    check_tomas_stein_envelope(quotient, f.arc.lambda_min)

    damping = params.damping
    trace = [SearchTraceRow(iteration=0, rayleigh=quotient, l6_error_estimate=estimate.error_estimate, damping=damping)]
    iterates = [f]
    best, best_quotient, best_error = f, quotient, estimate.error_estimate
    stalled = 0

    steps = tqdm(range(1, params.max_iters + 1), desc="ascent", disable=not settings.show_progress)
    for iteration in steps:
        candidate = ascent_step(f, damping, ctrl, threads=threads, sample=sample)
        candidate_sample, candidate_estimate = _evaluate(candidate, ctrl, threads)
        value = candidate_estimate.value
        trace.append(SearchTraceRow(
            iteration=iteration, rayleigh=value,
            l6_error_estimate=candidate_estimate.error_estimate, damping=damping,
        ))
        logger.info(f"ascent {iteration}: rayleigh={value:.10g} damping={damping:.4g}")

        change = value - quotient
        stalled = stalled + 1 if abs(change) < params.stall_tol else 0
        if value > best_quotient:
            best, best_quotient, best_error = candidate, value, candidate_estimate.error_estimate

        if change < 0.0 and damping > settings.damping_floor:
            damping = max(0.5 * damping, settings.damping_floor)
        else:
            f, sample, quotient = candidate, candidate_sample, value
            iterates.append(f)

        if stalled >= settings.stall_window:
            logger.info(f"ascent stalled after {iteration} steps")
            break

    check_tomas_stein_envelope(best_quotient, f.arc.lambda_min)
    logger.info(f"search finished: C_lower={best_quotient:.10g} (error {best_error:.2e})")
    return SearchResult(
        best=best,
        c_lower=best_quotient,
        error_estimate=best_error,
        trace=trace,
        iterates=iterates,
    )
