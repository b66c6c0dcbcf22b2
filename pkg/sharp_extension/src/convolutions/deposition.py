"""Cloud-in-cell deposition of point masses onto uniform node grids."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from ...errors import FieldError


@dataclass(frozen=True, eq=False)
class NodeMasses:
    """Masses carried by the nodes origin + spacing * (i, j)."""

    origin: np.ndarray
    spacing: Tuple[float, float]
    masses: np.ndarray

    @property
    def cell_area(self) -> float:
        return self.spacing[0] * self.spacing[1]

    @property
    def density(self) -> np.ndarray:
        return self.masses / self.cell_area

    def l2_density_norm(self) -> float:
        """||density||_2 with the node grid as a Riemann sum."""
        return float(np.sqrt(np.sum(np.abs(self.masses) ** 2) / self.cell_area))

    def node_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        nx, ny = self.masses.shape
        return (
            self.origin[0] + self.spacing[0] * np.arange(nx),
            self.origin[1] + self.spacing[1] * np.arange(ny),
        )

    def to_frame(self) -> pd.DataFrame:
        """Long table (u, v, value) of the density, u-major."""
        u, v = self.node_coordinates()
        uu, vv = np.meshgrid(u, v, indexing="ij")
        return pd.DataFrame({"u": uu.ravel(), "v": vv.ravel(), "value": self.density.real.ravel()})


def bounding_grid(positions: np.ndarray, spacing: float) -> Tuple[np.ndarray, Tuple[int, int]]:
    """Origin on the spacing lattice and node counts covering the positions with one spare node."""
    lo = np.floor(positions.min(axis=0) / spacing) * spacing - spacing
    hi = positions.max(axis=0)
    shape = tuple(int(np.ceil((hi[k] - lo[k]) / spacing)) + 2 for k in range(2))
    return lo, shape


def deposit(
    positions: np.ndarray,
    masses: np.ndarray,
    origin: np.ndarray,
    spacing: Tuple[float, float],
    shape: Tuple[int, int]
) -> np.ndarray:
    """
    Bilinear (cloud-in-cell) deposit of point masses.

    Every mass is split between the four surrounding nodes with area
    weights, so the total mass is preserved exactly.

    Args:
        positions: Points, shape (m, 2)
        masses: Real or complex masses, shape (m,)
        origin: Coordinates of node (0, 0)
        spacing: Node spacing (dx, dy)
        shape: Node counts (nx, ny)

    Returns:
        Node masses, shape ``shape``

    Raises:
        FieldError: a point falls outside the node grid
    """
    positions = np.asarray(positions, dtype=float)
    rel = (positions - np.asarray(origin)) / np.asarray(spacing)
    nx, ny = shape
    slack = 1e-9
    if (
        np.any(rel < -slack)
        or np.any(rel[:, 0] > nx - 1 + slack)
        or np.any(rel[:, 1] > ny - 1 + slack)
    ):
        raise FieldError("deposited points fall outside the node grid")
    cell = np.clip(np.floor(rel).astype(np.int64), 0, np.array([nx - 2, ny - 2]))
    frac = np.clip(rel - cell, 0.0, 1.0)

    masses = np.asarray(masses)
    total = np.zeros(nx * ny, dtype=np.result_type(masses.dtype, float))
    for di in (0, 1):
        wx = frac[:, 0] if di else 1.0 - frac[:, 0]
        for dj in (0, 1):
            wy = frac[:, 1] if dj else 1.0 - frac[:, 1]
            flat = (cell[:, 0] + di) * ny + (cell[:, 1] + dj)
            share = masses * wx * wy
            if np.iscomplexobj(share):
                total = total + (
                    np.bincount(flat, weights=share.real, minlength=nx * ny)
                    + 1j * np.bincount(flat, weights=share.imag, minlength=nx * ny)
                )
            else:
                total = total + np.bincount(flat, weights=share, minlength=nx * ny)
    return total.reshape(nx, ny)


def deposit_on_lattice(positions: np.ndarray, masses: np.ndarray, spacing: float) -> NodeMasses:
    """Deposit onto the smallest lattice-aligned grid covering the points."""
    origin, shape = bounding_grid(positions, spacing)
    return NodeMasses(origin, (spacing, spacing), deposit(positions, masses, origin, (spacing, spacing), shape))
