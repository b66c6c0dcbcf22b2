"""Densities on convex arcs and the norms every other module builds on."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np
import pandas as pd

from ...errors import FieldError
from ..geometry.arc_geometry import ConvexArc
from ..geometry.quadrature import odd_count, simpson_weights, trapezoid_weights
from ..models.specs import Cap

logger = logging.getLogger(__name__)

EDGE_TOLERANCE = 1e-9

MeasureKind = Literal["arclength", "projection"]
GridKind = Literal["s", "y"]
QuadratureRule = Literal["simpson", "trapezoid"]


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Finite sum of point masses in the plane."""

    positions: np.ndarray
    masses: np.ndarray

    @property
    def size(self) -> int:
        return self.masses.size

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.masses)))

    @property
    def center(self) -> np.ndarray:
        """Center of the bounding box of the positions."""
        return 0.5 * (self.positions.min(axis=0) + self.positions.max(axis=0))

    def support(self, tol: float = 0.0) -> "PointMeasure":
        """Drop point masses with |mass| <= tol."""
        keep = np.abs(self.masses) > tol
        return PointMeasure(self.positions[keep], self.masses[keep])


@dataclass(frozen=True, eq=False)
class ArcFunction:
    """
    Samples of a density on an arc.

    ``grid="s"`` stores values on the arc's uniform arclength grid with
    arclength measure. ``grid="y"`` stores values on the graph chart's
    y-grid, with either arclength measure (1 + h'^2)^(1/2) eta(y) dy or
    projection measure eta(y) dy.
    """

    arc: ConvexArc
    values: np.ndarray
    grid: GridKind = "s"
    measure_kind: MeasureKind = "arclength"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)

        if self.grid not in ("s", "y"):
            raise FieldError(f"unknown grid {self.grid!r}")
        if self.measure_kind not in ("arclength", "projection"):
            raise FieldError(f"unknown measure kind {self.measure_kind!r}")
        if self.grid == "y" and not self.arc.is_graph:
            raise FieldError("y-grid functions need a graph-built arc")
        if self.measure_kind == "projection" and self.grid != "y":
            raise FieldError("projection measure is only defined on the graph y-grid")
        if values.shape != (self.arc.n,):
            raise FieldError(f"expected {self.arc.n} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise FieldError("arc function has non-finite samples")

    @classmethod
    def from_arclength(cls, arc: ConvexArc, fn: Callable[[np.ndarray], np.ndarray]) -> "ArcFunction":
        """Sample fn(s) on the arclength grid."""
        return cls(arc, np.asarray(fn(arc.s_grid), dtype=complex))

    @classmethod
    def on_graph(
        cls,
        arc: ConvexArc,
        fn: Callable[[np.ndarray], np.ndarray],
        measure_kind: MeasureKind = "projection"
    ) -> "ArcFunction":
        """Sample fn(y) on the graph y-grid."""
        if not arc.is_graph:
            raise FieldError(f"{arc.label} has no graph chart")
        return cls(arc, np.asarray(fn(arc.chart.y), dtype=complex), grid="y", measure_kind=measure_kind)

    @classmethod
    def constant(cls, arc: ConvexArc, value: complex = 1.0) -> "ArcFunction":
        return cls(arc, np.full(arc.n, value, dtype=complex))

    def with_values(self, values: np.ndarray) -> "ArcFunction":
        """New function on the same arc, grid and measure."""
        return ArcFunction(self.arc, values, grid=self.grid, measure_kind=self.measure_kind)

    def scaled(self, c: complex) -> "ArcFunction":
        return self.with_values(c * self.values)

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights of the measure at the samples."""
        if self.grid == "s":
            return simpson_weights(self.arc.n, self.arc.step)
        chart = self.arc.chart
        w = simpson_weights(chart.y.size, chart.step) * chart.window
        if self.measure_kind == "arclength":
            w = w * chart.speed
        return w

    @property
    def positions(self) -> np.ndarray:
        return self.arc.gamma if self.grid == "s" else self.arc.chart.positions

    @property
    def s_coords(self) -> np.ndarray:
        """Arclength coordinate of every sample."""
        return self.arc.s_grid if self.grid == "s" else self.arc.chart.s_of_y

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol) and np.all(self.values.real >= -tol))

    def require_nonnegative(self, operation: str) -> None:
        if not self.is_nonnegative():
            bad = int(np.argmin(self.values.real))
            logger.error(f"{operation}: negative or complex samples (first at index {bad})")
            raise FieldError(f"{operation} needs a nonnegative real function")

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def point_measure(self) -> PointMeasure:
        """Point masses f(p_i) w_i at the sample positions."""
        return PointMeasure(self.positions, self.values * self.weights)

    def refined(self, factor: int, rule: QuadratureRule = "simpson") -> PointMeasure:
        """
        Point measure of the linearly interpolated function on a finer grid.

        Args:
            factor: Refinement factor (1 with the Simpson rule returns the native point measure)
            rule: "simpson" or "trapezoid" weights on the finer grid

        Returns:
            PointMeasure with about factor*(n-1)+1 samples
        """
        if factor <= 1 and rule == "simpson":
            return self.point_measure()
        m = odd_count(max(factor, 1) * (self.arc.n - 1) + 1)
        rule_weights = simpson_weights if rule == "simpson" else trapezoid_weights
        if self.grid == "s":
            s = np.linspace(0.0, self.arc.length, m)
            values = _interp_complex(s, self.arc.s_grid, self.values)
            weights = rule_weights(m, s[1] - s[0])
            positions = self.arc.position_at(s)
        else:
            chart = self.arc.chart
            y = np.linspace(chart.y[0], chart.y[-1], m)
            values = _interp_complex(y, chart.y, self.values)
            weights = rule_weights(m, y[1] - y[0]) * chart.spec.window(y)
            if self.measure_kind == "arclength":
                weights = weights * np.sqrt(1.0 + chart.spec.h(y, 1) ** 2)
            positions = chart.positions_at(y)
        return PointMeasure(positions, values * weights)

    def to_frame(self) -> pd.DataFrame:
        """Table (s, re, im), plus y for graph-grid functions."""
        frame = pd.DataFrame({"s": self.s_coords, "re": self.values.real, "im": self.values.imag})
        if self.grid == "y":
            frame.insert(0, "y", self.arc.chart.y)
        return frame


def _interp_complex(x: np.ndarray, xp: np.ndarray, fp: np.ndarray) -> np.ndarray:
    return np.interp(x, xp, fp.real) + 1j * np.interp(x, xp, fp.imag)


def as_arclength(f: ArcFunction) -> ArcFunction:
    """
    The same measure f dmu written as a density against arclength.

    Graph-grid values are interpolated at y(s); the window, and for the
    projection measure the factor dy/ds, are folded into the density.

    Args:
        f: Arc function on either grid

    Returns:
        ArcFunction on the arclength grid (f itself when it already is)
    """
    if f.grid == "s":
        return f
    chart = f.arc.chart
    y = f.arc.gamma[:, 0]
    density = _interp_complex(y, chart.y, f.values) * chart.spec.window(y)
    if f.measure_kind == "projection":
        density = density / np.sqrt(1.0 + chart.spec.h(y, 1) ** 2)
    return ArcFunction(f.arc, density)


def l2_sigma_norm(f: ArcFunction) -> float:
    """
    L2 norm of f with respect to its measure.

    Args:
        f: Arc function

    Returns:
        (sum_i w_i |f_i|^2)^(1/2)
    """
    return float(np.sqrt(np.sum(f.weights * np.abs(f.values) ** 2)))


def l1_sigma_norm(f: ArcFunction) -> float:
    return float(np.sum(f.weights * np.abs(f.values)))


def inner_product(f: ArcFunction, g: ArcFunction) -> complex:
    """<f, g> = sum_i w_i f_i conj(g_i); both functions must share arc, grid and measure."""
    _check_compatible(f, g)
    return complex(np.sum(f.weights * f.values * np.conj(g.values)))


def _check_compatible(f: ArcFunction, g: ArcFunction) -> None:
    if f.arc is not g.arc or f.grid != g.grid or f.measure_kind != g.measure_kind:
        raise FieldError("functions live on different arcs, grids or measures")


def edge_tolerance(f: ArcFunction) -> float:
    return EDGE_TOLERANCE * f.arc.length


def cap_weights(f: ArcFunction, cap: Cap) -> np.ndarray:
    """
    Sampled indicator of the cap: 1 inside, 1/2 on a sample at distance
    exactly radius from the center, 0 outside.

    Distances within EDGE_TOLERANCE times the arc length count as the edge.
    """
    offset = np.abs(f.s_coords - cap.center) - cap.radius
    tol = edge_tolerance(f)
    return np.where(offset < -tol, 1.0, np.where(offset <= tol, 0.5, 0.0))


def cap_mask(f: ArcFunction, cap: Cap) -> np.ndarray:
    """Boolean support of cap_weights, edge samples included."""
    return cap_weights(f, cap) > 0.0


def cap_measure(f: ArcFunction, cap: Cap) -> float:
    """Measure of the cap as seen by f's quadrature."""
    return float(np.sum(f.weights * cap_weights(f, cap)))


def restrict_to_cap(f: ArcFunction, cap: Cap) -> ArcFunction:
    """
    Zero the samples of f outside the cap.

    Args:
        f: Arc function
        cap: Cap with center on the arc (clipped at the endpoints)

    Returns:
        f times cap_weights, on the same arc

    Raises:
        FieldError: cap center outside [0, length]
    """
    if not 0.0 <= cap.center <= f.arc.length:
        logger.error(f"cap center {cap.center:.6g} outside [0, {f.arc.length:.6g}]")
        raise FieldError(f"cap center {cap.center:.6g} is not on the arc")
    return f.with_values(f.values * cap_weights(f, cap))
