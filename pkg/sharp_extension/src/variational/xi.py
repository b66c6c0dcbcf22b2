"""Trial family f_eps on a perturbed parabola and the deficit Xi(eps).

Xi(eps) = C_F[lam]^6 ||f_eps||^6 - ||(f_eps sigma)^||_6^6 is evaluated in the
rescaled variable u = y / eps. Under (x, t) -> (eps x, eps^2 t) the extension
of f_eps becomes the extension of the point measure with positions
(u, h(eps u) / eps^2) and masses (G0 + eps phi)(u) cut(u) ds/dy eta_I(eps u) du,
with the same L6 norm, so every eps is integrated on the same plane rule.
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from ...errors import FieldError
from ..extension.extension_operator import l6_norm_of_measure
from ..extension.gaussians import foschi_sixth_power, gaussian
from ..fields.arc_function import ArcFunction, PointMeasure
from ..geometry.arc_geometry import ConvexArc, build_from_graph
from ..geometry.quadrature import odd_count, simpson_weights, smoothstep
from ..models.results import XiRow, XiScanReport
from ..models.specs import L6Control, PerturbedParabolaSpec
from .quadratic_form import GaussianPolynomial

logger = logging.getLogger(__name__)

Perturbation = Callable[[np.ndarray], np.ndarray]

U_MIN = 3.5
TAPER = 0.25
U_STEP = 0.0025
TRIAL_SAMPLES = 4097


def cutoff_reach(pp: PerturbedParabolaSpec, eps: float) -> float:
    """
    Flat half-width U of the cutoff in the rescaled variable.

    eta_I(y / (eps log(1/eps))) is flat for |u| <= halfwidth * log(1/eps);
    U never drops below 3.5 lam^(-1/2) Gaussian widths.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5], got {eps}")
    U = max(pp.halfwidth * math.log(1.0 / eps), U_MIN / math.sqrt(pp.lam))
    reach = eps * (1.0 + TAPER) * U
    if reach > pp.domain_halfwidth:
        logger.error(f"cutoff support {reach:.4g} exceeds the graph domain {pp.domain_halfwidth:.4g}")
        raise FieldError(
            f"epsilon={eps} too large: cutoff support |y| <= {reach:.4g} "
            f"exceeds the graph domain {pp.domain_halfwidth:.4g}"
        )
    return U


def _cut(u: np.ndarray, U: float) -> np.ndarray:
    return 1.0 - smoothstep((np.abs(u) - U) / (TAPER * U))


def _perturbation(pp: PerturbedParabolaSpec, phi: Optional[Perturbation]) -> Perturbation:
    return phi if phi is not None else GaussianPolynomial.perturbation(pp.lam)


def _check_interval(pp: PerturbedParabolaSpec) -> None:
    slope = pp.max_slope_on_interval()
    if slope > 1.0:
        logger.warning(f"|h'| reaches {slope:.4g} > 1 on I; shrink the halfwidth")
    if not pp.satisfies_condition_a:
        logger.info(f"a={pp.a} lies outside [(lam/2)^3, (3/2)(lam/2)^3) for lam={pp.lam}")


def trial_function(
    pp: PerturbedParabolaSpec,
    eps: float,
    phi: Optional[Perturbation] = None,
    arc: Optional[ConvexArc] = None,
    n: int = TRIAL_SAMPLES
) -> ArcFunction:
    """
    f_eps(y) = eps^(-1/2) (G0 + eps phi)(y / eps) times the cutoff, on the graph y-grid.

    Args:
        pp: Perturbed parabola
        eps: Concentration scale in (0, 0.5]
        phi: Perturbation in the rescaled variable (defaults to c_lam u G0(u))
        arc: Arc built from ``pp`` (built with ``n`` samples when omitted)
        n: Sample count for a freshly built arc

    Returns:
        ArcFunction with arclength measure (1 + h'^2)^(1/2) eta_I dy

    Raises:
        FieldError: the cutoff support leaves the graph domain, or ``arc``
            was not built from ``pp``
    """
    U = cutoff_reach(pp, eps)
    if arc is None:
        arc = build_from_graph(pp, n)
    elif arc.chart is None or arc.chart.spec != pp:
        raise FieldError("trial_function needs an arc built from the same perturbed parabola")
    phi = _perturbation(pp, phi)

    u = arc.chart.y / eps
    values = eps ** -0.5 * (gaussian(u, pp.lam) + eps * phi(u)) * _cut(u, U)
    return ArcFunction(arc, values, grid="y", measure_kind="arclength")


def rescaled_measure(
    pp: PerturbedParabolaSpec,
    eps: float,
    phi: Optional[Perturbation] = None,
    u_step: float = U_STEP
):
    """
    Point measure of f_eps in the rescaled variable and ||f_eps||^2.

    Returns:
        (PointMeasure, l2 squared norm under the arclength measure)
    """
    U = cutoff_reach(pp, eps)
    phi = _perturbation(pp, phi)
    reach = (1.0 + TAPER) * U
    count = odd_count(int(math.ceil(2.0 * reach / u_step)) + 1)
    u = np.linspace(-reach, reach, count)
    w = simpson_weights(count, float(u[1] - u[0]))

    y = eps * u
    amplitude = (gaussian(u, pp.lam) + eps * phi(u)) * _cut(u, U)
    density = np.sqrt(1.0 + pp.h(y, 1) ** 2) * pp.window(y)
    l2 = float(np.sum(w * np.abs(amplitude) ** 2 * density))
    positions = np.column_stack([u, pp.h(y) / eps ** 2])
    return PointMeasure(positions, w * amplitude * density), l2


def xi(
    pp: PerturbedParabolaSpec,
    eps: float,
    phi: Optional[Perturbation] = None,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None
) -> XiRow:
    """
    Xi(eps) = C_F[lam]^6 ||f_eps||_{L2(sigma~)}^6 - ||(f_eps sigma~)^||_6^6.

    Args:
        pp: Perturbed parabola
        eps: Concentration scale in (0, 0.5]
        phi: Perturbation (defaults to c_lam u G0(u))
        ctrl: Plane quadrature in the rescaled plane
        threads: Worker count

    Returns:
        XiRow with the deficit, its two terms and the error of the L6 term
    """
    _check_interval(pp)
    measure, l2 = rescaled_measure(pp, eps, phi)
    estimate = l6_norm_of_measure(measure, ctrl or L6Control(), threads=threads)
    l2_term = foschi_sixth_power(pp.lam) * l2 ** 3
    l6_term = estimate.value ** 6
    row = XiRow(
        epsilon=eps,
        xi=l2_term - l6_term,
        l2_term=l2_term,
        l6_term=l6_term,
        l6_error=6.0 * estimate.value ** 5 * estimate.error_estimate,
    )
    logger.info(f"Xi({eps:.4g}) = {row.xi:.8g} (L6 error {row.l6_error:.2e})")
    return row


def xi_second_derivative(pp: PerturbedParabolaSpec) -> float:
    """Xi''(0) = 8 pi^(3/2) lam^(-7/2) C_F[lam]^6 (a - 3 lam^3 / 16); psi does not enter."""
    lam = pp.lam
    return 8.0 * math.pi ** 1.5 * lam ** -3.5 * foschi_sixth_power(lam) * (pp.a - 3.0 * lam ** 3 / 16.0)


def second_central_difference(epsilons: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """(Xi(e3) - 2 Xi(e2) + Xi(e1)) / d^2 for three equally spaced epsilons, else None."""
    if len(epsilons) != 3:
        return None
    order = np.argsort(epsilons)
    e = np.asarray(epsilons, dtype=float)[order]
    v = np.asarray(values, dtype=float)[order]
    d = e[1] - e[0]
    if d <= 0.0 or not math.isclose(e[2] - e[1], d, rel_tol=1e-9):
        return None
    return float((v[2] - 2.0 * v[1] + v[0]) / d ** 2)


def xi_scan(
    pp: PerturbedParabolaSpec,
    epsilons: Sequence[float],
    phi: Optional[Perturbation] = None,
    ctrl: Optional[L6Control] = None,
    threads: Optional[int] = None
) -> XiScanReport:
    """Xi along ``epsilons`` with the second central difference next to the closed-form Xi''(0)."""
    rows = [xi(pp, float(eps), phi, ctrl, threads) for eps in epsilons]
    second = second_central_difference([r.epsilon for r in rows], [r.xi for r in rows])
    predicted = xi_second_derivative(pp)
    if second is not None:
        logger.info(f"second difference {second:.6g} vs closed form {predicted:.6g}")
    return XiScanReport(
        lam=pp.lam,
        a=pp.a,
        rows=rows,
        second_difference=second,
        predicted_second_derivative=predicted,
    )
