"""Input models: curve specifications, caps, plane grids and control blocks."""

import math
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ...config import settings
from ..geometry.quadrature import smoothstep


class CircleSpec(BaseModel):
    """Arc of a circle of radius ``radius`` spanning ``extent`` radians."""

    kind: Literal["circle"] = "circle"
    radius: float = Field(gt=0.0)
    extent: float = Field(gt=0.0, lt=2.0 * math.pi)


class ParabolaSpec(BaseModel):
    """Graph of h(y) = mu*y^2/2 over [-halfwidth, halfwidth]."""

    kind: Literal["parabola"] = "parabola"
    mu: float = Field(gt=0.0)
    halfwidth: float = Field(gt=0.0)

    def h(self, y: np.ndarray, derivative: int = 0) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if derivative == 0:
            return 0.5 * self.mu * y ** 2
        if derivative == 1:
            return self.mu * y
        if derivative == 2:
            return np.full_like(y, self.mu)
        return np.zeros_like(y)

    @property
    def domain_halfwidth(self) -> float:
        return self.halfwidth

    def window(self, y: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(y, dtype=float))


class PerturbedParabolaSpec(BaseModel):
    """Graph of h(y) = lam*y^2/2 + a*y^4 + psi(y) with psi of degree >= 5.

    The interval I = [-halfwidth, halfwidth] carries the window eta_I, which is
    1 on I and decays to 0 over ``mollifier_margin`` on each side. The graph is
    built over I enlarged by the margin.
    """

    model_config = ConfigDict(populate_by_name=True)

    kind: Literal["perturbed_parabola"] = "perturbed_parabola"
    lam: float = Field(gt=0.0, alias="lambda")
    a: float = 0.0
    psi: Dict[int, float] = Field(default_factory=dict)
    halfwidth: float = Field(gt=0.0)
    mollifier_margin: Optional[float] = Field(default=None, gt=0.0)

    @field_validator("psi")
    @classmethod
    def _psi_degrees(cls, value: Dict[int, float]) -> Dict[int, float]:
        low = [k for k in value if k < 5]
        if low:
            raise ValueError(f"psi coefficients must have degree >= 5, got degrees {sorted(low)}")
        return value

    @property
    def margin(self) -> float:
        # |I|/8 on each side
        return self.mollifier_margin if self.mollifier_margin is not None else self.halfwidth / 4.0

    @property
    def domain_halfwidth(self) -> float:
        return self.halfwidth + self.margin

    def h(self, y: np.ndarray, derivative: int = 0) -> np.ndarray:
        """Evaluate h or one of its first four derivatives."""
        y = np.asarray(y, dtype=float)
        coeffs = {2: 0.5 * self.lam, 4: self.a}
        for degree, c in self.psi.items():
            coeffs[degree] = coeffs.get(degree, 0.0) + c
        out = np.zeros_like(y)
        for degree, c in coeffs.items():
            if degree < derivative or c == 0.0:
                continue
            factor = math.perm(degree, derivative)
            out = out + c * factor * y ** (degree - derivative)
        return out

    @property
    def satisfies_condition_a(self) -> bool:
        """(lam/2)^3 <= a < (3/2)(lam/2)^3."""
        base = (0.5 * self.lam) ** 3
        return base <= self.a < 1.5 * base

    def max_slope_on_interval(self, samples: int = 1001) -> float:
        """max |h'| over I."""
        y = np.linspace(-self.halfwidth, self.halfwidth, samples)
        return float(np.max(np.abs(self.h(y, 1))))

    def window(self, y: np.ndarray) -> np.ndarray:
        """eta_I: 1 on I, quintic smoothstep to 0 across the margin."""
        y = np.abs(np.asarray(y, dtype=float))
        return 1.0 - smoothstep((y - self.halfwidth) / self.margin)


class CurvatureSamplesSpec(BaseModel):
    """Curvature values on a uniform arclength grid of [0, length]."""

    kind: Literal["curvature_samples"] = "curvature_samples"
    kappa: List[float] = Field(min_length=2)
    length: float = Field(gt=0.0)

    @field_validator("kappa")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if min(value) <= 0.0:
            raise ValueError("curvature samples must be strictly positive")
        return value


CurveSpec = Annotated[
    Union[CircleSpec, ParabolaSpec, PerturbedParabolaSpec, CurvatureSamplesSpec],
    Field(discriminator="kind"),
]

GraphSpec = Union[ParabolaSpec, PerturbedParabolaSpec]


class Cap(BaseModel):
    """Arc interval {|s' - center| < radius}."""

    model_config = ConfigDict(frozen=True)

    center: float
    radius: float = Field(gt=0.0)

    @property
    def lower(self) -> float:
        return self.center - self.radius

    @property
    def upper(self) -> float:
        return self.center + self.radius

    def clipped_length(self, length: float) -> float:
        """Arclength of the cap after clipping to [0, length]."""
        return max(0.0, min(self.upper, length) - max(self.lower, 0.0))


class PlaneGrid(BaseModel):
    """Rectangular (x, t) node grid."""

    model_config = ConfigDict(frozen=True)

    x_min: float
    x_max: float
    t_min: float
    t_max: float
    nx: int = Field(ge=2)
    nt: int = Field(ge=2)

    @model_validator(mode="after")
    def _nondegenerate(self) -> "PlaneGrid":
        if not (self.x_max > self.x_min and self.t_max > self.t_min):
            raise ValueError("plane grid ranges must be nondegenerate")
        return self

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nt)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.nt - 1)

    def nodes(self) -> np.ndarray:
        """All nodes as an (nx*nt, 2) array, x-major."""
        xx, tt = np.meshgrid(self.x, self.t, indexing="ij")
        return np.column_stack([xx.ravel(), tt.ravel()])

    def shifted(self, dx: float, dt: float) -> "PlaneGrid":
        return self.model_copy(update={
            "x_min": self.x_min + dx, "x_max": self.x_max + dx,
            "t_min": self.t_min + dt, "t_max": self.t_max + dt,
        })

    def covers(self, points: np.ndarray) -> bool:
        points = np.asarray(points)
        return bool(
            points[:, 0].min() >= self.x_min and points[:, 0].max() <= self.x_max
            and points[:, 1].min() >= self.t_min and points[:, 1].max() <= self.t_max
        )


class L6Control(BaseModel):
    """Polar plane quadrature used for the L6 norm of an extension.

    The disk of radius R_k is integrated in coordinates (X, T) with
    (x, t) = (scale[0]*X, scale[1]*T).
    """

    radii: Tuple[float, float, float] = Field(default_factory=lambda: tuple(settings.l6_radii))
    panel_width: float = Field(default_factory=lambda: settings.l6_panel_width, gt=0.0)
    panel_nodes: int = Field(default_factory=lambda: settings.l6_panel_nodes, ge=2)
    angle_nodes: int = Field(default_factory=lambda: settings.l6_angle_nodes, ge=8)
    scale: Tuple[float, float] = (1.0, 1.0)

    @field_validator("radii")
    @classmethod
    def _increasing(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if not (0.0 < value[0] < value[1] < value[2]):
            raise ValueError(f"radii must satisfy 0 < R1 < R2 < R3, got {value}")
        return value

    @field_validator("scale")
    @classmethod
    def _positive_scale(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if value[0] <= 0.0 or value[1] <= 0.0:
            raise ValueError("scale factors must be positive")
        return value


class DecompositionParams(BaseModel):
    """Controls for the cap decomposition algorithm."""

    c_estimate: float = Field(gt=0.0)
    max_steps: int = Field(default=20, ge=1)
    residual_tol: float = Field(default=1e-3, ge=0.0)
    grid_nodes: int = Field(default=256, ge=16)


class SearchParams(BaseModel):
    """Controls for the extremizer ascent."""

    max_iters: int = Field(default=100, ge=0)
    damping: float = Field(default=1.0, gt=0.0, le=1.0)
    stall_tol: float = Field(default=1e-7, ge=0.0)
    l6: L6Control = Field(default_factory=L6Control)
