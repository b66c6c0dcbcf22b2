"""Upper-normalization tails and small-cap concentration of function sequences."""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from ...errors import FieldError
from ..fields.arc_function import ArcFunction, l2_sigma_norm
from ..models.results import ConcentrationReport, UpperProfile
from ..models.specs import Cap
from .caps import cap_sums

logger = logging.getLogger(__name__)

CONCENTRATION_FRACTION = 0.9


def _native_coordinate(f: ArcFunction) -> np.ndarray:
    return f.arc.s_grid if f.grid == "s" else f.arc.chart.y


def _measure_density(f: ArcFunction) -> np.ndarray:
    """d(measure)/d(native coordinate) at the samples."""
    if f.grid == "s":
        return np.ones(f.arc.n)
    chart = f.arc.chart
    return chart.window * (chart.speed if f.measure_kind == "arclength" else 1.0)


def upper_profile(f: ArcFunction, cap: Cap, R_values: Sequence[float]) -> UpperProfile:
    """
    Height and space tails of |f|^2 relative to the cap (s0, r0).

    tail_height(R) = integral of |f|^2 over {|f| >= R r0^(-1/2)}
    tail_space(R)  = integral of |f|^2 over {|s - s0| >= R r0}

    The space tail comes from the cumulative Simpson integral, interpolated
    by a cubic spline at the cap boundaries.

    Args:
        f: Arc function
        cap: Reference cap
        R_values: Increasing thresholds

    Returns:
        UpperProfile with one value per R
    """
    R_values = [float(R) for R in R_values]
    q = _native_coordinate(f)
    power = np.abs(f.values) ** 2
    cumulative = cumulative_simpson(power * _measure_density(f), x=q, initial=0.0)
    primitive = CubicSpline(q, cumulative)
    total = float(cumulative[-1])
    s = f.s_coords

    heights, spaces = [], []
    for R in R_values:
        level = R * cap.radius ** -0.5
        heights.append(float(np.sum(f.weights * power * (np.abs(f.values) >= level))))

        a = float(np.interp(cap.center - R * cap.radius, s, q))
        b = float(np.interp(cap.center + R * cap.radius, s, q))
        inside = float(primitive(b) - primitive(a))
        spaces.append(max(total - inside, 0.0))

    return UpperProfile(cap=cap, R_values=R_values, tail_height=heights, tail_space=spaces)


def concentration_radii(f: ArcFunction, levels: int = 6) -> List[float]:
    """Ladder length * 2^-j, j = 1..min(levels, log2(length / 4h))."""
    arc = f.arc
    depth = min(levels, int(math.floor(math.log2(arc.length / (4.0 * arc.step)))))
    return [arc.length * 2.0 ** -j for j in range(1, max(depth, 1) + 1)]


def best_cap_fraction(f: ArcFunction, radius: float):
    """Largest fraction of ||f||_2^2 carried by a cap of the given radius, and its center."""
    norm2 = l2_sigma_norm(f) ** 2
    if norm2 == 0.0:
        raise FieldError("mass fractions are undefined for f = 0")
    centers, sums = cap_sums(f, np.abs(f.values) ** 2, radius)
    k = int(np.argmax(sums))
    return float(sums[k] / norm2), float(centers[k])


def concentration_metric(
    fs: Sequence[ArcFunction],
    radii: Optional[Sequence[float]] = None
) -> ConcentrationReport:
    """
    Small-cap mass fractions of a sequence and the point it concentrates at.

    Args:
        fs: At least two nonzero functions on a common arc
        radii: Decreasing radius ladder (defaults to concentration_radii)

    Returns:
        ConcentrationReport; ``concentrated`` is set when the last function
        keeps more than 90% of its mass in a cap of the smallest radius
    """
    if len(fs) < 2:
        raise ValueError(f"need at least two functions, got {len(fs)}")
    arc = fs[0].arc
    if any(f.arc is not arc for f in fs):
        raise FieldError("concentration_metric needs functions on a common arc")
    radii = sorted((float(r) for r in (concentration_radii(fs[0]) if radii is None else radii)), reverse=True)

    fractions = [[best_cap_fraction(f, r)[0] for r in radii] for f in fs]
    last_fraction, center = best_cap_fraction(fs[-1], radii[-1])
    concentrated = last_fraction > CONCENTRATION_FRACTION

    kappa = float(arc.kappa_at(center))
    window = np.abs(arc.s_grid - center) < radii[-1]
    spread = float(np.ptp(arc.kappa[window])) if np.any(window) else 0.0
    at_minimum = abs(kappa - arc.lambda_min) <= spread + 1e-9 * arc.lambda_min
    logger.info(
        f"concentration: last fraction {last_fraction:.4f} at s={center:.5g}, "
        f"kappa={kappa:.6g}, lambda={arc.lambda_min:.6g}"
    )
    return ConcentrationReport(
        radii=radii,
        fractions=fractions,
        concentrated=concentrated,
        center=center,
        kappa_at_center=kappa,
        lambda_min=arc.lambda_min,
        at_curvature_minimum=bool(at_minimum),
    )
