"""Triple autoconvolution of the arclength measure of a small cap.

In the local frame of a cap (origin at the cap center, tangent along the
first axis) the cap is a convex graph X -> g(X) with g(0) = g'(0) = 0 and
g''(0) = kappa. The density of sigma * sigma * sigma at (xi, tau) is

    1/sqrt(3) * integral over theta of G(w1) G(w2) G(w3) rho / d_rho psi

where w = xi/3 + rho * (unit vector of angle theta in the plane
w1 + w2 + w3 = xi), psi = sum g(w_k) - 3 g(xi/3), rho solves
psi = tau - 3 g(xi/3) and G = (1 + g'^2)^(1/2) on the cap.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from ...config import settings
from ...errors import GeometryError, NumericalFailure
from ..geometry.arc_geometry import ConvexArc
from ..models.results import SupLimitReport, SupLimitRow
from ..models.specs import Cap

logger = logging.getLogger(__name__)

_SQ2 = math.sqrt(2.0)
_SQ6 = math.sqrt(6.0)


@dataclass(frozen=True, eq=False)
class CapChart:
    """Local graph chart of a cap.

    Attributes:
        cap: The cap, clipped to the arc
        origin: gamma at the cap center
        rotation: Matrix taking plane vectors to local coordinates
        kappa: Curvature at the cap center
        x_lo: Left end of the cap in local coordinates
        x_hi: Right end of the cap in local coordinates
        g: Cubic spline of the local graph
    """

    cap: Cap
    origin: np.ndarray
    rotation: np.ndarray
    kappa: float
    x_lo: float
    x_hi: float
    g: CubicSpline

    @classmethod
    def from_arc(cls, arc: ConvexArc, cap: Cap, samples: int = 801) -> "CapChart":
        """
        Build the chart of ``cap`` on ``arc``.

        Raises:
            GeometryError: the cap center is off the arc or the cap turns by
                more than a right angle on one side (not a graph)
        """
        if not 0.0 <= cap.center <= arc.length:
            raise GeometryError(f"cap center {cap.center:.6g} is not on {arc.label}")
        lo, hi = max(cap.lower, 0.0), min(cap.upper, arc.length)
        s = np.linspace(lo, hi, samples)
        theta_c = float(arc.theta_at(cap.center))
        turning = np.abs(arc.theta_at(s) - theta_c)
        if np.max(turning) >= 0.5 * np.pi:
            logger.error(f"cap {cap} turns by {np.max(turning):.3f} rad on {arc.label}")
            raise GeometryError("cap is too large for a local graph chart")

        origin = arc.position_at(cap.center)
        c, sn = math.cos(theta_c), math.sin(theta_c)
        rotation = np.array([[c, sn], [-sn, c]])
        local = (arc.position_at(s) - origin) @ rotation.T
        spline = CubicSpline(local[:, 0], local[:, 1])
        return cls(
            cap=cap,
            origin=origin,
            rotation=rotation,
            kappa=float(arc.kappa_at(cap.center)),
            x_lo=float(local[0, 0]),
            x_hi=float(local[-1, 0]),
            g=spline,
        )

    def to_local(self, points: np.ndarray, copies: int = 1) -> np.ndarray:
        """Local coordinates of sums of ``copies`` plane points."""
        return (np.asarray(points) - copies * self.origin) @ self.rotation.T

    def weight(self, x: np.ndarray) -> np.ndarray:
        """(1 + g'^2)^(1/2) inside the cap, 0 outside."""
        x = np.asarray(x, dtype=float)
        inside = (x >= self.x_lo) & (x <= self.x_hi)
        slope = self.g(np.clip(x, self.x_lo, self.x_hi), 1)
        return np.where(inside, np.sqrt(1.0 + slope ** 2), 0.0)

    def rho_max(self, center: float, directions: np.ndarray) -> np.ndarray:
        """Largest rho keeping every w_k inside the cap, per direction row."""
        limit = np.full(directions.shape[0], np.inf)
        for k in range(3):
            c = directions[:, k]
            with np.errstate(divide="ignore"):
                bound = np.where(
                    c > 0.0, (self.x_hi - center) / c,
                    np.where(c < 0.0, (self.x_lo - center) / c, np.inf),
                )
            limit = np.minimum(limit, bound)
        return limit

    def density(self, xi: float, tau: float, theta_nodes: Optional[int] = None) -> float:
        """
        Density of the cap's triple autoconvolution at local (xi, tau).

        Args:
            xi: Local first coordinate of the sum point
            tau: Local second coordinate of the sum point
            theta_nodes: Trapezoid nodes on the circle of directions

        Returns:
            Density value, 0 outside the support

        Raises:
            NumericalFailure: Newton iteration does not converge
        """
        center = xi / 3.0
        if center <= self.x_lo or center >= self.x_hi:
            return 0.0
        g0 = float(self.g(center))
        g2 = float(self.g(center, 2))
        u = tau - 3.0 * g0
        scale = max(g2 * (self.x_hi - self.x_lo) ** 2, 1e-300)
        if u < -1e-14 * scale:
            return 0.0

        n = theta_nodes or settings.theta_nodes
        theta = 2.0 * np.pi * np.arange(n) / n
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        directions = np.column_stack([
            -(cos_t / _SQ2 + sin_t / _SQ6),
            cos_t / _SQ2 - sin_t / _SQ6,
            2.0 * sin_t / _SQ6,
        ])

        if u <= 1e-14 * scale:
            # rho / d_rho psi -> 1 / g''(xi/3)
            return float(2.0 * np.pi * self.weight(center) ** 3 / g2 / math.sqrt(3.0))

        hi = self.rho_max(center, directions)
        psi_hi = self._psi(center, hi, directions)[0] - 3.0 * g0
        active = psi_hi >= u
        if not np.any(active):
            return 0.0

        rho = self._solve(center, g0, g2, u, directions[active], hi[active], (xi, tau, theta[active]))
        points = center + rho[:, None] * directions[active]
        _, slope = self._psi(center, rho, directions[active])
        integrand = np.prod(self.weight(points), axis=1) * rho / slope
        return float(np.sum(integrand) * (2.0 * np.pi / n) / math.sqrt(3.0))

    def _psi(self, center: float, rho: np.ndarray, directions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """sum g(w_k) and its rho-derivative, w clipped to the cap."""
        points = np.clip(center + rho[:, None] * directions, self.x_lo, self.x_hi)
        value = np.sum(self.g(points), axis=1)
        slope = np.sum(self.g(points, 1) * directions, axis=1)
        return value, slope

    def _solve(
        self,
        center: float,
        g0: float,
        g2: float,
        u: float,
        directions: np.ndarray,
        hi: np.ndarray,
        where: Tuple[float, float, np.ndarray]
    ) -> np.ndarray:
        """Safeguarded Newton for psi(rho) = u on [0, hi], one root per direction."""
        lo = np.zeros_like(hi)
        hi = hi.copy()
        rho = np.minimum(np.sqrt(2.0 * u / g2), hi)
        tol = 1e-13 * max(float(np.max(hi)), 1e-300)

        for _ in range(settings.newton_max_iter):
            value, slope = self._psi(center, rho, directions)
            residual = value - 3.0 * g0 - u
            lo = np.where(residual < 0.0, rho, lo)
            hi = np.where(residual > 0.0, rho, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(slope > 0.0, residual / slope, np.inf)
            candidate = rho - step
            outside = ~np.isfinite(candidate) | (candidate <= lo) | (candidate >= hi)
            candidate = np.where(outside, 0.5 * (lo + hi), candidate)
            done = (np.abs(candidate - rho) <= tol) | (hi - lo <= tol)
            rho = candidate
            if np.all(done):
                return rho

        xi, tau, theta = where
        worst = int(np.argmax(hi - lo))
        diagnostics = {"xi": xi, "tau": tau, "theta": float(theta[worst]), "bracket": float(hi[worst] - lo[worst])}
        logger.error(f"Newton iteration did not converge at xi={xi:.6g}, tau={tau:.6g}")
        raise NumericalFailure("triple density root solve did not converge", diagnostics)


def triple_autoconv_density(arc: ConvexArc, cap: Cap, xi: float, tau: float) -> float:
    """
    Density of sigma_C * sigma_C * sigma_C at local coordinates (xi, tau).

    Args:
        arc: Convex arc
        cap: Cap small enough to be a graph over its tangent at the center
        xi: Local tangential coordinate of the sum point (origin 3 gamma(s))
        tau: Local normal coordinate of the sum point

    Returns:
        Density value; 0 outside the support
    """
    return CapChart.from_arc(arc, cap).density(xi, tau)


def support_grid(chart: CapChart, n_xi: int = 41, n_u: int = 21) -> List[Tuple[float, float]]:
    """Points (xi, tau) covering the support near its lower boundary."""
    reach = 0.8 * min(-chart.x_lo, chart.x_hi)
    u_top = 0.25 * chart.kappa * reach ** 2
    points = []
    for center in np.linspace(-reach, reach, n_xi):
        base = 3.0 * float(chart.g(center))
        for u in np.linspace(0.0, u_top, n_u):
            points.append((3.0 * float(center), base + float(u)))
    return points


def cap_sup(chart: CapChart, n_xi: int = 41, n_u: int = 21) -> float:
    """Largest density over the support grid."""
    return max(chart.density(xi, tau) for xi, tau in support_grid(chart, n_xi, n_u))


def support_bins(chart: CapChart) -> Tuple[np.ndarray, np.ndarray]:
    """Histogram edges (xi_edges, tau_edges) of a 3 x 4 block of bins inside the support."""
    r, kappa = chart.cap.radius, chart.kappa
    xi_edges = np.linspace(-0.3 * r, 0.3 * r, 4)
    tau_edges = np.linspace(0.05 * kappa * r ** 2, 0.25 * kappa * r ** 2, 5)
    return xi_edges, tau_edges


def implied_operator_norm(limit: float) -> float:
    """((2 pi)^2 * limit)^(1/6)."""
    return ((2.0 * np.pi) ** 2 * limit) ** (1.0 / 6.0)


def triple_autoconv_sup_limit(
    arc: ConvexArc,
    center: float,
    radii: Sequence[float],
    monotone_tol: float = 1e-3
) -> SupLimitReport:
    """
    Sup of the cap triple autoconvolution for shrinking caps and its r -> 0 limit.

    Args:
        arc: Convex arc
        center: Arclength of the cap center
        radii: At least three cap radii
        monotone_tol: Relative tolerance of the monotonicity check

    Returns:
        SupLimitReport with per-radius sups, the linear-in-r extrapolation
        and the implied limiting operator norm
    """
    radii = sorted((float(r) for r in radii), reverse=True)
    if len(radii) < 3:
        raise ValueError(f"need at least three radii, got {len(radii)}")

    rows = []
    for r in radii:
        chart = CapChart.from_arc(arc, Cap(center=center, radius=r))
        sup = cap_sup(chart)
        rows.append(SupLimitRow(radius=r, sup=sup, implied_norm=implied_operator_norm(sup)))
        logger.info(f"cap radius {r:.4g}: sup of triple density {sup:.6g}")

    sups = np.array([row.sup for row in rows])
    slope, intercept = np.polyfit(np.array(radii), sups, 1)
    diffs = np.diff(sups) / np.abs(sups[:-1])
    monotone = bool(np.all(diffs <= monotone_tol) or np.all(diffs >= -monotone_tol))
    if not monotone:
        logger.warning(f"sup sequence is not monotone in the radius: {sups.tolist()}")

    kappa = float(arc.kappa_at(center))
    return SupLimitReport(
        center=center,
        kappa_center=kappa,
        rows=rows,
        limit=float(intercept),
        implied_norm=implied_operator_norm(float(intercept)),
        expected_limit=2.0 * np.pi / (math.sqrt(3.0) * kappa),
        monotone=monotone,
    )


def monte_carlo_triple_density(
    arc: ConvexArc,
    cap: Cap,
    xi_edges: np.ndarray,
    tau_edges: np.ndarray,
    samples: int,
    seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Histogram estimate of the triple autoconvolution density.

    Triples (s1, s2, s3) are drawn uniformly on the cap; each sum point
    carries mass |C|^3 / samples.

    Args:
        arc: Convex arc
        cap: Cap
        xi_edges: Bin edges in the local tangential coordinate
        tau_edges: Bin edges in the local normal coordinate
        samples: Number of triples
        seed: Generator seed

    Returns:
        (density, standard_error) per bin
    """
    chart = CapChart.from_arc(arc, cap)
    lo, hi = max(cap.lower, 0.0), min(cap.upper, arc.length)
    rng = np.random.default_rng(seed)
    counts = np.zeros((len(xi_edges) - 1, len(tau_edges) - 1))
    batch = 1 << 18
    drawn = 0
    while drawn < samples:
        size = min(batch, samples - drawn)
        s = rng.uniform(lo, hi, size=(size, 3))
        sums = arc.position_at(s.ravel()).reshape(size, 3, 2).sum(axis=1)
        local = chart.to_local(sums, copies=3)
        hist, _, _ = np.histogram2d(local[:, 0], local[:, 1], bins=[xi_edges, tau_edges])
        counts += hist
        drawn += size

    area = np.outer(np.diff(xi_edges), np.diff(tau_edges))
    mass = (hi - lo) ** 3 / samples
    return counts * mass / area, np.sqrt(counts) * mass / area
