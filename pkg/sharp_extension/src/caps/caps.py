"""Cap metric, the refined cap functional, the cap split and the cap decomposition."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ...errors import FieldError
from ..convolutions.convolutions import triple_convolution_density
from ..fields.arc_function import ArcFunction, cap_mask, cap_measure, cap_weights, edge_tolerance, l2_sigma_norm
from ..geometry.arc_geometry import ConvexArc
from ..models.results import CapFunctionalResult, DecompositionStepReport
from ..models.specs import Cap, DecompositionParams

logger = logging.getLogger(__name__)


def cap_distance(cap: Cap, other: Cap) -> float:
    """
    Hyperbolic distance between (center, radius) points of the upper half plane.

    arccosh(1 + ((s - s')^2 + (r - r')^2) / (2 r r')), evaluated as
    2 arcsinh of the half chord so that nearby caps keep full precision.
    """
    chord = (cap.center - other.center) ** 2 + (cap.radius - other.radius) ** 2
    return 2.0 * math.asinh(math.sqrt(chord / (4.0 * cap.radius * other.radius)))


def lattice_radii(arc: ConvexArc) -> List[float]:
    """Dyadic radii length * 2^-k down to four grid steps."""
    levels = max(0, int(math.floor(math.log2(arc.length / (4.0 * arc.step)))))
    return [arc.length * 2.0 ** -k for k in range(levels + 1)]


def cap_sums(f: ArcFunction, density: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrals of a sampled density over the caps of one radius centered at every grid sample.

    Args:
        f: Arc function providing sample coordinates and weights
        density: Values to integrate against f's measure
        radius: Cap radius

    Returns:
        (centers, sums) for the caps {|s - center| <= radius}, edge samples
        at half weight as in cap_weights
    """
    s = f.s_coords
    centers = f.arc.s_grid
    tol = edge_tolerance(f)
    prefix = np.concatenate([[0.0], np.cumsum(density * f.weights)])
    open_sums = (
        prefix[np.searchsorted(s, centers + radius - tol, side="left")]
        - prefix[np.searchsorted(s, centers - radius + tol, side="right")]
    )
    closed_sums = (
        prefix[np.searchsorted(s, centers + radius + tol, side="right")]
        - prefix[np.searchsorted(s, centers - radius - tol, side="left")]
    )
    return centers, 0.5 * (open_sums + closed_sums)


def cap_functional_max(f: ArcFunction) -> CapFunctionalResult:
    """
    Maximize |C|^(-1/4) * integral over C of |f|^(3/2) over the cap lattice.

    Centers run over every arclength sample, radii over the dyadic ladder;
    |C| is the arclength of the cap clipped to the arc. Ties resolve to the
    largest radius, then to the smallest center.

    Args:
        f: Nonzero arc function

    Returns:
        CapFunctionalResult with the maximizing cap and the value
    """
    if f.is_zero():
        raise FieldError("cap functional is undefined for f = 0")
    length = f.arc.length
    power = np.abs(f.values) ** 1.5
    best_value, best_cap = -1.0, None
    for radius in lattice_radii(f.arc):
        centers, sums = cap_sums(f, power, radius)
        measure = np.minimum(centers + radius, length) - np.maximum(centers - radius, 0.0)
        values = sums * measure ** -0.25
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value = float(values[k])
            best_cap = Cap(center=float(centers[k]), radius=radius)
    return CapFunctionalResult(cap=best_cap, value=best_value)


@dataclass(frozen=True, eq=False)
class SplitResult:
    """f = g + h with g supported on a cap and bounded by the threshold."""

    g: ArcFunction
    h: ArcFunction
    cap: Cap
    threshold: float
    cap_integral: float

    @property
    def cap_mass(self) -> float:
        """Measure of the cap under the function's quadrature."""
        return cap_measure(self.g, self.cap)

    def holder_lower_bound(self) -> float:
        """|C|^(-1/6) (integral over C of g^(3/2))^(2/3), a lower bound for ||g||_2."""
        inside = np.sum(self.g.weights * np.abs(self.g.values) ** 1.5)
        return self.cap_mass ** (-1.0 / 6.0) * inside ** (2.0 / 3.0)

    def l1_lower_bound(self) -> float:
        """a^-1 b^2 |C|^(1/2) with a = sup g |C|^(1/2) and b = ||g||_2."""
        a = float(np.max(np.abs(self.g.values))) * math.sqrt(self.cap_mass)
        b = l2_sigma_norm(self.g)
        return b ** 2 * math.sqrt(self.cap_mass) / a if a > 0.0 else 0.0


def split(f: ArcFunction) -> SplitResult:
    """
    Split a nonnegative function at its best cap.

    With m = integral over C of f^(3/2) the threshold R is fixed by
    R^(-1/2) = m / (2 ||f||_2^2); g keeps the samples of f inside C with
    f <= R, halved on the cap edges as in cap_weights, and h = f - g. Then
    integral over C of g^(3/2) >= m / 2.

    Args:
        f: Nonnegative, nonzero arc function

    Returns:
        SplitResult

    Raises:
        FieldError: f has negative or complex samples, or vanishes
    """
    f.require_nonnegative("split")
    best = cap_functional_max(f)
    cap = best.cap
    weight = cap_weights(f, cap)
    m = float(np.sum(f.weights * weight * f.real ** 1.5))
    threshold = (2.0 * l2_sigma_norm(f) ** 2 / m) ** 2

    keep = cap_mask(f, cap) & (f.real <= threshold)
    g = f.with_values(np.where(keep, weight * f.values, 0.0))
    h = f.with_values(np.where(keep, (1.0 - weight) * f.values, f.values))
    logger.debug(
        f"split at cap ({cap.center:.6g}, {cap.radius:.6g}): "
        f"m={m:.6g}, R={threshold:.6g}, |g|_2={l2_sigma_norm(g):.6g}"
    )
    return SplitResult(g=g, h=h, cap=cap, threshold=threshold, cap_integral=m)


@dataclass(frozen=True, eq=False)
class DecompositionStep:
    """One recorded step: the extracted piece and its report."""

    piece: ArcFunction
    report: DecompositionStepReport


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Ordered pieces f_n and the final residual; sum of pieces + residual = f."""

    source: ArcFunction
    steps: List[DecompositionStep] = field(default_factory=list)
    residual: Optional[ArcFunction] = None
    stop_reason: str = ""

    @property
    def eps_star(self) -> List[float]:
        return [step.report.eps_star for step in self.steps]

    @property
    def caps(self) -> List[Cap]:
        return [step.report.cap for step in self.steps]

    def reconstruction(self) -> np.ndarray:
        total = np.array(self.residual.values, copy=True)
        for step in self.steps:
            total = total + step.piece.values
        return total


def decompose(f: ArcFunction, params: DecompositionParams) -> Decomposition:
    """
    Cap decomposition f = f_0 + f_1 + ... + residual.

    At step n the triple convolution norm T_n of the current remainder G_n
    is compared with eps^3 C^3 ||f||^3 / (2 pi); eps starts at 1/2 and is
    halved until T_n reaches that level, which defines eps_n*. G_n is then
    split into f_n + G_(n+1).

    Args:
        f: Nonnegative arc function
        params: A-priori constant, step cap, residual tolerance and lattice size

    Returns:
        Decomposition

    Raises:
        FieldError: f has negative samples
    """
    f.require_nonnegative("decompose")
    if params.c_estimate <= 0.0:
        raise ValueError(f"c_estimate must be positive, got {params.c_estimate}")

    norm = l2_sigma_norm(f)
    scale = params.c_estimate ** 3 * norm ** 3 / (2.0 * math.pi)
    extent = float(np.max(np.ptp(f.positions, axis=0)))
    spacing = extent / params.grid_nodes

    remainder = f
    eps = 0.5
    steps: List[DecompositionStep] = []
    reason = "max_steps"
    for n in range(params.max_steps):
        if remainder.is_zero():
            reason = "zero_remainder"
            break
        if l2_sigma_norm(remainder) <= params.residual_tol * norm:
            reason = "residual_tol"
            break
        triple = triple_convolution_density(remainder, remainder, remainder, spacing).l2_density_norm()
        if triple <= 0.0:
            reason = "zero_triple_norm"
            break
        while triple < eps ** 3 * scale:
            eps *= 0.5

        lower, upper = eps ** 3 * scale, 8.0 * eps ** 3 * scale
        holds = lower <= triple <= upper
        if not holds:
            logger.warning(f"step {n}: sandwich violated, T={triple:.6g} not in [{lower:.6g}, {upper:.6g}]")

        parts = split(remainder)
        report = DecompositionStepReport(
            step=n,
            cap=parts.cap,
            eps_star=eps,
            l2_mass=l2_sigma_norm(parts.g) ** 2,
            triple_norm=triple,
            lower_bound=lower,
            upper_bound=upper,
            sandwich_holds=holds,
            threshold=parts.threshold,
        )
        steps.append(DecompositionStep(piece=parts.g, report=report))
        logger.info(
            f"decomposition step {n}: cap=({parts.cap.center:.5g}, {parts.cap.radius:.5g}), "
            f"eps*={eps:.4g}, |f_n|^2={report.l2_mass:.6g}"
        )
        remainder = parts.h

    if steps and reason == "max_steps" and l2_sigma_norm(remainder) <= params.residual_tol * norm:
        reason = "residual_tol"
    logger.info(f"decomposition finished after {len(steps)} steps ({reason})")
    return Decomposition(source=f, steps=steps, residual=remainder, stop_reason=reason)

