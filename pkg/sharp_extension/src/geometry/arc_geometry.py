"""Planar convex arcs parametrized by arclength.

Arcs are built either from curvature data (closed form for circles,
cumulative Simpson quadrature of kappa and of (cos theta, sin theta)
otherwise) or from a convex graph y -> h(y), in which case the graph chart
is kept next to the arclength samples.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from ...errors import GeometryError
from ..models.results import K2Report
from ..models.specs import (
    CircleSpec,
    CurvatureSamplesSpec,
    GraphSpec,
    ParabolaSpec,
    PerturbedParabolaSpec,
)
from .quadrature import odd_count

logger = logging.getLogger(__name__)

MIN_SAMPLES = 64


@dataclass(frozen=True, eq=False)
class GraphChart:
    """Graph parametrization (y, h(y)) of an arc on a uniform y-grid."""

    spec: GraphSpec
    y: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    d2h: np.ndarray
    s_of_y: np.ndarray
    window: np.ndarray

    @property
    def step(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.y, self.h])

    @property
    def speed(self) -> np.ndarray:
        """ds/dy = (1 + h'^2)^(1/2)."""
        return np.sqrt(1.0 + self.dh ** 2)

    def positions_at(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.column_stack([y, self.spec.h(y)])


@dataclass(frozen=True, eq=False)
class ConvexArc:
    """Arclength-parametrized convex arc with its geometric samples.

    Attributes:
        length: Total arclength
        s_grid: Uniform samples of [0, length]
        gamma: Positions, shape (n, 2)
        theta: Turning angle at the samples
        kappa: Curvature at the samples
        lambda_min: Minimum sampled curvature
        delta0: Colinear-tangent margin min |t(s) + t(s')|
        chart: Graph chart for graph-built arcs
    """

    length: float
    s_grid: np.ndarray
    gamma: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    lambda_min: float
    delta0: float
    chart: Optional[GraphChart] = None
    label: str = field(default="arc")

    @property
    def n(self) -> int:
        return self.s_grid.size

    @property
    def step(self) -> float:
        return float(self.s_grid[1] - self.s_grid[0])

    @property
    def is_graph(self) -> bool:
        return self.chart is not None

    def tangents(self) -> np.ndarray:
        return np.column_stack([np.cos(self.theta), np.sin(self.theta)])

    @cached_property
    def _gamma_spline(self) -> CubicSpline:
        return CubicSpline(self.s_grid, self.gamma, axis=0)

    @cached_property
    def _theta_spline(self) -> CubicSpline:
        return CubicSpline(self.s_grid, self.theta)

    @cached_property
    def _kappa_spline(self) -> CubicSpline:
        return CubicSpline(self.s_grid, self.kappa)

    def position_at(self, s: np.ndarray) -> np.ndarray:
        """Interpolated positions at arbitrary arclength values."""
        return self._gamma_spline(np.asarray(s, dtype=float))

    def theta_at(self, s: np.ndarray) -> np.ndarray:
        return self._theta_spline(np.asarray(s, dtype=float))

    def kappa_at(self, s: np.ndarray) -> np.ndarray:
        return self._kappa_spline(np.asarray(s, dtype=float))

    def nearest_index(self, s: float) -> int:
        return int(np.clip(np.rint(s / self.step), 0, self.n - 1))


def _validate(arc_kappa: np.ndarray, label: str) -> None:
    if not np.all(np.isfinite(arc_kappa)):
        raise GeometryError(f"{label}: non-finite curvature samples")
    bad = np.flatnonzero(arc_kappa <= 0.0)
    if bad.size:
        logger.error(f"{label}: {bad.size} non-positive curvature samples")
        raise GeometryError(
            f"{label}: curvature must be strictly positive, "
            f"first offending sample {bad[0]} has kappa={arc_kappa[bad[0]]:.6g}"
        )


def _finish(
    s_grid: np.ndarray,
    gamma: np.ndarray,
    theta: np.ndarray,
    kappa: np.ndarray,
    label: str,
    chart: Optional[GraphChart] = None
) -> ConvexArc:
    _validate(kappa, label)
    delta0 = colinear_margin(theta)
    total = float(theta[-1] - theta[0])
    if delta0 <= 1e-12 or total >= np.pi:
        logger.error(f"{label}: colinear tangents (total turning {total:.6f} rad)")
        raise GeometryError(
            f"{label}: arc has colinear tangents, delta0={delta0:.3e}, "
            f"total turning {total:.6f} rad must stay below pi"
        )
    arc = ConvexArc(
        length=float(s_grid[-1]),
        s_grid=s_grid,
        gamma=gamma,
        theta=theta,
        kappa=kappa,
        lambda_min=float(kappa.min()),
        delta0=delta0,
        chart=chart,
        label=label,
    )
    logger.info(
        f"Built {label}: length={arc.length:.6g}, n={arc.n}, "
        f"lambda_min={arc.lambda_min:.6g}, delta0={arc.delta0:.6g}"
    )
    return arc


def build_from_curvature(
    spec: Union[CircleSpec, CurvatureSamplesSpec],
    n: int
) -> ConvexArc:
    """
    Build an arc from its curvature.

    theta is the cumulative quadrature of kappa and gamma the cumulative
    quadrature of (cos theta, sin theta), normalized so that gamma(0) = 0 and
    theta(0) = 0. Circles use the exact formulas.

    Args:
        spec: Circle or curvature-samples specification
        n: Sample count (raised to the next odd number)

    Returns:
        ConvexArc

    Raises:
        GeometryError: non-positive curvature or colinear tangents
    """
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if isinstance(spec, (ParabolaSpec, PerturbedParabolaSpec)):
        return build_from_graph(spec, n)
    n = odd_count(n)

    if isinstance(spec, CircleSpec):
        length = spec.radius * spec.extent
        s_grid = np.linspace(0.0, length, n)
        theta = s_grid / spec.radius
        gamma = spec.radius * np.column_stack([np.sin(theta), 1.0 - np.cos(theta)])
        kappa = np.full(n, 1.0 / spec.radius)
        return _finish(s_grid, gamma, theta, kappa, f"circle(r={spec.radius:g})")

    if not isinstance(spec, CurvatureSamplesSpec):
        raise ValueError(f"unsupported curve kind: {getattr(spec, 'kind', spec)!r}")

    raw = np.asarray(spec.kappa, dtype=float)
    _validate(raw, "curvature_samples")
    s_grid = np.linspace(0.0, spec.length, n)
    if raw.size == n:
        kappa = raw.copy()
    else:
        kappa = CubicSpline(np.linspace(0.0, spec.length, raw.size), raw)(s_grid)
    h = s_grid[1] - s_grid[0]
    theta = cumulative_simpson(kappa, dx=h, initial=0.0)
    gamma = np.column_stack([
        cumulative_simpson(np.cos(theta), dx=h, initial=0.0),
        cumulative_simpson(np.sin(theta), dx=h, initial=0.0),
    ])
    return _finish(s_grid, gamma, theta, kappa, "curvature_samples")


def build_from_graph(spec: GraphSpec, n: int) -> ConvexArc:
    """
    Build the arc (y, h(y)) over the spec's domain and reparametrize by arclength.

    Args:
        spec: Parabola or perturbed-parabola specification
        n: Sample count for both the y-grid and the arclength grid

    Returns:
        ConvexArc with its GraphChart attached, in native graph coordinates

    Raises:
        GeometryError: h'' <= 0 somewhere on the domain
    """
    if not isinstance(spec, (ParabolaSpec, PerturbedParabolaSpec)):
        raise ValueError(f"build_from_graph needs a graph spec, got {getattr(spec, 'kind', spec)!r}")
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    n = odd_count(n)

    width = spec.domain_halfwidth
    y = np.linspace(-width, width, n)
    d2h = spec.h(y, 2)
    if np.any(d2h <= 0.0):
        bad = y[d2h <= 0.0][0]
        logger.error(f"{spec.kind}: h'' <= 0 at y={bad:.6g}")
        raise GeometryError(f"{spec.kind}: graph is not strictly convex, h''({bad:.6g}) <= 0")
    dh = spec.h(y, 1)
    s_of_y = cumulative_simpson(np.sqrt(1.0 + dh ** 2), x=y, initial=0.0)
    if np.any(np.diff(s_of_y) <= 0.0):
        raise GeometryError(f"{spec.kind}: arclength table is not monotone")

    chart = GraphChart(
        spec=spec, y=y, h=spec.h(y), dh=dh, d2h=d2h,
        s_of_y=s_of_y, window=spec.window(y),
    )

    length = float(s_of_y[-1])
    s_grid = np.linspace(0.0, length, n)
    y_of_s = CubicSpline(s_of_y, y)(s_grid)
    y_of_s[0], y_of_s[-1] = -width, width
    slope = spec.h(y_of_s, 1)
    gamma = np.column_stack([y_of_s, spec.h(y_of_s)])
    theta = np.arctan(slope)
    kappa = spec.h(y_of_s, 2) / (1.0 + slope ** 2) ** 1.5
    return _finish(s_grid, gamma, theta, kappa, spec.kind, chart=chart)


def build_arc(spec, n: int) -> ConvexArc:
    """Dispatch to the builder matching the spec kind."""
    if isinstance(spec, (ParabolaSpec, PerturbedParabolaSpec)):
        return build_from_graph(spec, n)
    return build_from_curvature(spec, n)


def colinear_margin(theta: np.ndarray) -> float:
    """min over sample pairs of |t(s) + t(s')| = 2|cos((theta - theta')/2)|."""
    theta = np.sort(np.asarray(theta, dtype=float))
    targets = theta + np.pi
    idx = np.searchsorted(theta, targets)
    best = 2.0
    for candidate in (np.clip(idx - 1, 0, theta.size - 1), np.clip(idx, 0, theta.size - 1)):
        gap = theta[candidate] - theta
        best = min(best, float(np.min(2.0 * np.abs(np.cos(0.5 * gap)))))
    # pairs with the two extremes
    gap = theta[-1] - theta[0]
    best = min(best, float(2.0 * abs(np.cos(0.5 * gap))))
    return best


def check_no_colinear_tangents(arc: ConvexArc) -> float:
    """
    Colinear-tangent margin of an arc.

    Args:
        arc: A valid arc

    Returns:
        delta0 in (0, 2]
    """
    return colinear_margin(arc.theta)


def _second_derivative(values: np.ndarray, i: int, h: float) -> float:
    i = int(np.clip(i, 2, values.size - 3))
    v = values[i - 2:i + 3]
    return float((-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h))


def _runs(indices: np.ndarray) -> List[Tuple[int, int]]:
    if indices.size == 0:
        return []
    splits = np.flatnonzero(np.diff(indices) > 1)
    starts = np.concatenate([[0], splits + 1])
    ends = np.concatenate([splits, [indices.size - 1]])
    return [(int(indices[a]), int(indices[b])) for a, b in zip(starts, ends)]


def check_k2_condition(arc: ConvexArc, tolerance: float = 0.0) -> K2Report:
    """
    Check kappa'' < (3/2) kappa^3 at every global curvature minimum.

    Minima are the samples within 1e-9*(max - min) of the global minimum,
    grouped into contiguous runs; each run is represented by its middle
    sample and kappa'' comes from the 5-point centered stencil.

    Args:
        arc: A valid arc
        tolerance: Margin must exceed this value

    Returns:
        K2Report with the margin, minima locations and endpoint flag
    """
    kappa = arc.kappa
    k_min, k_max = float(kappa.min()), float(kappa.max())
    threshold = k_min + 1e-9 * (k_max - k_min)
    runs = _runs(np.flatnonzero(kappa <= threshold))

    margins, centers = [], []
    endpoint = False
    for start, end in runs:
        if start <= 2 or end >= arc.n - 3:
            endpoint = True
        mid = (start + end) // 2
        k = float(kappa[mid])
        margins.append(1.5 * k ** 3 - _second_derivative(kappa, mid, arc.step))
        centers.append(float(arc.s_grid[mid]))

    margin = float(min(margins))
    if endpoint:
        logger.warning(f"{arc.label}: curvature minimum at an endpoint")
    return K2Report(
        holds=margin > tolerance,
        margin=margin,
        minima=centers,
        endpoint_minimum=endpoint,
        kappa_min=k_min,
    )
