"""Fixed input families for experiments and regression tests."""

from typing import List, Optional, Sequence

import numpy as np

from ..convolutions.convolutions import cap_indicator
from ..extension.gaussians import gaussian
from ..fields.arc_function import ArcFunction
from ..geometry.arc_geometry import ConvexArc
from ..models.specs import Cap
from ..variational.quadratic_form import GaussianPolynomial


def smooth_bump(arc: ConvexArc, center: float, radius: float) -> ArcFunction:
    """exp(1 - 1/(1 - r^2)) with r = (s - center)/radius, zero for |r| >= 1."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    r = (arc.s_grid - center) / radius
    inside = np.abs(r) < 1.0
    values = np.zeros(arc.n)
    values[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return ArcFunction(arc, values)


def graph_bump(arc: ConvexArc, radius: float, measure_kind: str = "projection") -> ArcFunction:
    """Smooth bump of half-width ``radius`` centered at y = 0 on a graph arc's y-grid."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")

    def bump(y: np.ndarray) -> np.ndarray:
        r2 = np.minimum((y / radius) ** 2, 1.0)
        with np.errstate(divide="ignore"):
            return np.where(r2 < 1.0, np.exp(1.0 - 1.0 / (1.0 - r2)), 0.0)

    return ArcFunction.on_graph(arc, bump, measure_kind=measure_kind)


def gaussian_on_arc(arc: ConvexArc, center: float, width: float) -> ArcFunction:
    """exp(-(s - center)^2 / (2 width^2)) on the arclength grid."""
    return ArcFunction.from_arclength(arc, lambda s: np.exp(-0.5 * ((s - center) / width) ** 2))


def parabola_gaussian(arc: ConvexArc, lam: Optional[float] = None) -> ArcFunction:
    """G0(y) = exp(-lam y^2 / 2) on a parabola's y-grid with projection measure."""
    lam = lam if lam is not None else float(arc.chart.spec.h(np.array(0.0), 2))
    return ArcFunction.on_graph(arc, lambda y: gaussian(y, lam), measure_kind="projection")


def transplant_gaussian(arc: ConvexArc, s0: float, n: float) -> ArcFunction:
    """n^(1/2) G0(n (s - s0)) with G0 built from the curvature at s0."""
    kappa = float(arc.kappa_at(s0))
    return ArcFunction.from_arclength(arc, lambda s: np.sqrt(n) * gaussian(n * (s - s0), kappa))


def concentrating_sequence(arc: ConvexArc, s0: float, scales: Sequence[float] = (8.0, 16.0, 32.0, 64.0)) -> List[ArcFunction]:
    """Transplanted Gaussians at s0 with growing concentration."""
    return [transplant_gaussian(arc, s0, n) for n in scales]


def two_bump(arc: ConvexArc, centers: Sequence[float], radius: float, heights: Sequence[float] = (1.0, 0.6)) -> ArcFunction:
    """Sum of two disjoint smooth bumps."""
    if len(centers) != 2 or len(heights) != 2:
        raise ValueError("two_bump takes exactly two centers and two heights")
    values = sum(h * smooth_bump(arc, c, radius).values for c, h in zip(centers, heights))
    return ArcFunction(arc, values)


def cap_function(arc: ConvexArc, center: float, radius: float) -> ArcFunction:
    return cap_indicator(arc, Cap(center=center, radius=radius))


def regression_family(arc: ConvexArc, size: int = 3) -> List[ArcFunction]:
    """
    Nonnegative inputs used by the cross-checks: a constant, a centered bump,
    an off-center Gaussian, a two-bump input, then bumps sliding along the arc.

    Args:
        arc: Arc
        size: Number of functions (at least 1)

    Returns:
        List of ArcFunctions on the arclength grid
    """
    length = arc.length
    family = [
        ArcFunction.constant(arc, 1.0),
        smooth_bump(arc, 0.5 * length, 0.3 * length),
        gaussian_on_arc(arc, 0.35 * length, 0.15 * length),
        two_bump(arc, (0.25 * length, 0.7 * length), 0.15 * length),
    ]
    k = 0
    while len(family) < size:
        k += 1
        center = length * (0.2 + 0.6 * ((0.37 * k) % 1.0))
        family.append(smooth_bump(arc, center, 0.2 * length))
    return family[:size]


def random_gaussian_polynomials(
    lam: float,
    count: int,
    degree: int = 4,
    seed: int = 0
) -> List[GaussianPolynomial]:
    """
    Seeded random phi = P(y) exp(-beta y^2 / 2).

    Coefficients are complex normal scaled by lam^(k/2) so each term has
    comparable size at the Gaussian scale; beta ranges over [0.5 lam, 2 lam].
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        coeffs = coeffs * lam ** (0.5 * np.arange(degree + 1))
        beta = lam * rng.uniform(0.5, 2.0)
        out.append(GaussianPolynomial(tuple(coeffs), beta))
    return out
