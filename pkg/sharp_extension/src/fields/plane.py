"""Complex samples on a rectangular (x, t) grid."""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from ...errors import FieldError
from ..models.specs import PlaneGrid


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Values of a plane function on ``grid``, shape (nx, nt)."""

    grid: PlaneGrid
    values: np.ndarray
    under_resolved: bool = False

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.nx, self.grid.nt):
            raise FieldError(
                f"field shape {values.shape} does not match grid ({self.grid.nx}, {self.grid.nt})"
            )
        object.__setattr__(self, "values", values)

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at(self, i: int, j: int) -> complex:
        return complex(self.values[i, j])

    def total(self) -> float:
        """Riemann sum of the real part, sum(values) dx dt."""
        return float(np.sum(self.values.real) * self.grid.dx * self.grid.dt)

    def to_frame(self) -> pd.DataFrame:
        """Long table (x, t, re, im), x-major."""
        nodes = self.grid.nodes()
        flat = self.values.ravel()
        return pd.DataFrame({
            "x": nodes[:, 0],
            "t": nodes[:, 1],
            "re": flat.real,
            "im": np.imag(flat),
        })
