"""Pair and triple convolutions of weighted arc measures.

Densities are obtained by depositing quadrature masses onto node grids.
Norms with an integrable |s - s'|^(-alpha) singularity use product
integration: the inner integral is taken exactly against the piecewise
linear interpolant of the integrand's smooth factor.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import reduce
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from ...config import settings
from ...errors import FieldError
from ..fields.arc_function import ArcFunction, as_arclength, cap_weights
from ..fields.plane import ComplexField
from ..geometry.arc_geometry import ConvexArc
from ..geometry.quadrature import simpson_weights, trapezoid_weights
from ..models.specs import Cap, PlaneGrid
from .deposition import NodeMasses, deposit, deposit_on_lattice

logger = logging.getLogger(__name__)

CELLS_PER_EXTENT = 256
OVERSAMPLE = 8


def _plane_step(f: ArcFunction) -> float:
    """Upper bound for the plane distance between consecutive samples."""
    if f.grid == "s":
        return f.arc.step
    return f.arc.chart.step * float(np.max(f.arc.chart.speed))


def _fine_measure(f: ArcFunction, spacing: float, oversample: int):
    factor = max(1, int(math.ceil(oversample * _plane_step(f) / spacing)))
    return f.refined(factor, rule="trapezoid").support()


def _require_real(f: ArcFunction, operation: str) -> None:
    if np.any(f.values.imag != 0.0):
        logger.error(f"{operation}: complex samples on {f.arc.label}")
        raise FieldError(f"{operation} needs real functions")


def triple_convolution_density(
    f: ArcFunction,
    g: ArcFunction,
    h: ArcFunction,
    spacing: Optional[float] = None
) -> NodeMasses:
    """
    Node masses of f sigma * g sigma * h sigma.

    Each measure is deposited on a common lattice and the three mass grids
    are convolved discretely, so the total mass is the product of the three
    total masses.

    Args:
        f, g, h: Arc functions (possibly complex, possibly on different arcs)
        spacing: Lattice spacing (defaults to the largest arc extent / 256)

    Returns:
        NodeMasses on the lattice covering supp f + supp g + supp h
    """
    functions = (f, g, h)
    if spacing is None:
        extent = max(float(np.max(np.ptp(fn.positions, axis=0))) for fn in functions)
        spacing = extent / CELLS_PER_EXTENT
    if spacing <= 0.0:
        raise ValueError(f"spacing must be positive, got {spacing}")

    measures = [_fine_measure(fn, spacing, 2) for fn in functions]
    if any(m.size == 0 for m in measures):
        return NodeMasses(np.zeros(2), (spacing, spacing), np.zeros((1, 1)))

    grids = [deposit_on_lattice(m.positions, m.masses, spacing) for m in measures]
    masses = reduce(fftconvolve, [grid.masses for grid in grids])
    origin = sum(grid.origin for grid in grids)
    logger.debug(f"triple convolution on a {masses.shape} lattice, spacing {spacing:.3e}")
    return NodeMasses(origin, (spacing, spacing), masses)


def l6_norm_convolution(f: ArcFunction, spacing: Optional[float] = None) -> float:
    """
    ||(|f| sigma)^||_6 = (2 pi |||f| sigma * |f| sigma * |f| sigma||_2)^(1/3).

    Args:
        f: Real arc function
        spacing: Deposition lattice spacing

    Returns:
        L6 norm through Plancherel

    Raises:
        FieldError: f has complex samples
    """
    _require_real(f, "l6_norm_convolution")
    magnitude = f.with_values(np.abs(f.values))
    density = triple_convolution_density(magnitude, magnitude, magnitude, spacing)
    return (2.0 * math.pi * density.l2_density_norm()) ** (1.0 / 3.0)


def pair_convolution_density(
    f: ArcFunction,
    g: ArcFunction,
    grid: PlaneGrid,
    oversample: int = OVERSAMPLE,
    threads: Optional[int] = None
) -> ComplexField:
    """
    Density of f sigma * g sigma on a plane grid.

    Every pair sum gamma(s) + gamma(s') receives the mass f(s) g(s') w w'
    and is deposited bilinearly; both branches of the two-to-one map
    contribute. The arc measures are resampled so that consecutive points
    are at most min(dx, dt) / oversample apart.

    Args:
        f: Real arc function
        g: Real arc function on the same arc
        grid: Plane grid covering supp f + supp g
        oversample: Points per cell along each arc direction
        threads: Worker count

    Returns:
        ComplexField with real values (density per unit area)

    Raises:
        FieldError: complex inputs, different arcs, or a grid that does
            not cover the pair sums
    """
    _require_real(f, "pair_convolution_density")
    _require_real(g, "pair_convolution_density")
    if f.arc is not g.arc:
        raise FieldError("pair_convolution_density needs functions on the same arc")

    spacing = min(grid.dx, grid.dt)
    mf = _fine_measure(f, spacing, oversample)
    mg = _fine_measure(g, spacing, oversample)
    if mf.size == 0 or mg.size == 0:
        return ComplexField(grid, np.zeros((grid.nx, grid.nt)))

    corners = np.array([
        mf.positions.min(axis=0) + mg.positions.min(axis=0),
        mf.positions.max(axis=0) + mg.positions.max(axis=0),
    ])
    if not grid.covers(corners):
        logger.error(f"plane grid does not cover the pair sums {corners.tolist()}")
        raise FieldError("plane grid does not cover supp f + supp g")

    origin = np.array([grid.x_min, grid.t_min])
    cell = (grid.dx, grid.dt)
    shape = (grid.nx, grid.nt)
    rows = max(1, settings.block_elements // mg.size)
    starts = list(range(0, mf.size, rows))
    f_masses = mf.masses.real
    g_masses = mg.masses.real

    def block(start: int) -> np.ndarray:
        stop = start + rows
        sums = (mf.positions[start:stop, None, :] + mg.positions[None, :, :]).reshape(-1, 2)
        masses = np.outer(f_masses[start:stop], g_masses).ravel()
        return deposit(sums, masses, origin, cell, shape)

    parallel = threads > 1 if threads else settings.is_parallel
    if parallel and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads or settings.threads) as pool:
            total = reduce(np.add, pool.map(block, starts))
    else:
        total = reduce(np.add, map(block, starts))
    return ComplexField(grid, total / (grid.dx * grid.dt))


def singular_weights(n: int, step: float, alpha: float, rows: slice) -> np.ndarray:
    """
    Product-integration weights for integral of u(x') |x_i - x'|^(-alpha) dx'.

    Row i holds the integrals of the hat functions centered at every grid
    node against |x_i - x'|^(-alpha); hats at the two end nodes are halved.

    Args:
        n: Number of uniform nodes
        step: Node spacing
        alpha: Exponent in (0, 1)
        rows: Slice of target nodes

    Returns:
        Array of shape (len(rows), n)
    """
    i = np.arange(n)[rows]
    d = (np.arange(n)[None, :] - i[:, None]).astype(float)

    def primitive(x):
        return np.sign(x) * np.abs(x) ** (1.0 - alpha) / (1.0 - alpha)

    def first_moment(x):
        return np.abs(x) ** (2.0 - alpha) / (2.0 - alpha)

    left = (1.0 - d) * (primitive(d) - primitive(d - 1.0)) + (first_moment(d) - first_moment(d - 1.0))
    right = (1.0 + d) * (primitive(d + 1.0) - primitive(d)) - (first_moment(d + 1.0) - first_moment(d))
    weights = left + right
    weights[:, 0] = right[:, 0]
    weights[:, -1] = left[:, -1]
    return step ** (1.0 - alpha) * weights


def _outer_weights(n: int, step: float) -> np.ndarray:
    return simpson_weights(n, step) if n % 2 == 1 else trapezoid_weights(n, step)


def bilinear_form(F: np.ndarray, G: np.ndarray, step: float, alpha: float) -> float:
    """
    B_alpha(F, G) = double integral of F(x) G(x') |x - x'|^(-alpha).

    Args:
        F: Samples on a uniform grid
        G: Samples on the same grid
        step: Grid spacing
        alpha: Exponent, strictly between 0 and 1

    Returns:
        Real value
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    if F.shape != G.shape or F.ndim != 1:
        raise FieldError("bilinear_form needs two 1-D arrays of equal length")
    n = F.size
    outer = _outer_weights(n, step)
    rows = max(1, settings.block_elements // n)
    total = 0.0
    for start in range(0, n, rows):
        block = slice(start, min(start + rows, n))
        inner = singular_weights(n, step, alpha, block) @ G
        total += float(np.sum(outer[block] * F[block] * inner))
    return total


def l32_norm_pair(f: ArcFunction, g: ArcFunction) -> float:
    """
    ||f sigma * g sigma||_{3/2} by integration in (s, s') coordinates.

    With J = |sin(theta(s) - theta(s'))| the density at gamma(s) + gamma(s')
    is (f(s) g(s') + f(s') g(s)) / J, so

        ||.||^(3/2) = 1/2 double integral of (f g' + f' g)^(3/2) J^(-1/2) ds ds'.

    The factor (|s - s'| / J)^(1/2) is smooth, with value kappa^(-1/2) on the
    diagonal, and |s - s'|^(-1/2) is integrated exactly. Separated and
    overlapping supports go through the same formula.

    Args:
        f: Nonnegative arc function
        g: Nonnegative arc function on the same arc

    Returns:
        The L^(3/2) norm of the pair convolution
    """
    f.require_nonnegative("l32_norm_pair")
    g.require_nonnegative("l32_norm_pair")
    if f.arc is not g.arc:
        raise FieldError("l32_norm_pair needs functions on the same arc")
    fa = as_arclength(f).real
    ga = as_arclength(g).real
    if not np.any(fa) or not np.any(ga):
        return 0.0

    arc = f.arc
    n, h = arc.n, arc.step
    outer = _outer_weights(n, h)
    rows = max(1, settings.block_elements // n)
    total = 0.0
    for start in range(0, n, rows):
        block = slice(start, min(start + rows, n))
        i = np.arange(n)[block]
        ds = np.abs(arc.s_grid[i, None] - arc.s_grid[None, :])
        jac = np.abs(np.sin(arc.theta[i, None] - arc.theta[None, :]))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.sqrt(ds / jac)
        ratio[np.arange(i.size), i] = arc.kappa[i] ** -0.5
        mass = (np.outer(fa[i], ga) + np.outer(ga[i], fa)) ** 1.5
        inner = np.sum(singular_weights(n, h, 0.5, block) * mass * ratio, axis=1)
        total += float(np.sum(outer[i] * inner))
    return (0.5 * total) ** (2.0 / 3.0)


def cap_indicator(arc: ConvexArc, cap: Cap) -> ArcFunction:
    """chi_C on the arclength grid, half on edge samples."""
    template = ArcFunction.constant(arc, 1.0)
    return template.with_values(cap_weights(template, cap))


def cap_interaction(arc: ConvexArc, cap: Cap, other: Cap) -> float:
    """||chi_C sigma * chi_C' sigma||_{3/2}."""
    return l32_norm_pair(cap_indicator(arc, cap), cap_indicator(arc, other))


def triple_cap_norm(arc: ConvexArc, caps, spacing: Optional[float] = None) -> float:
    """||chi_C sigma * chi_C' sigma * chi_C'' sigma||_2 for three caps."""
    f, g, h = (cap_indicator(arc, cap) for cap in caps)
    return triple_convolution_density(f, g, h, spacing).l2_density_norm()
