"""Closed-form Gaussian extensions on the parabola h(y) = lam*y^2/2 and Foschi constants.

All plane functions use the convention G(x, t) = (f sigma)^(-x, t), i.e.
G(x, t) = integral of f(y) exp(i*x*y - i*t*lam*y^2/2) dy.
"""

import math
from typing import Literal

import numpy as np

GaussianKind = Literal["G1", "G2", "G3", "phi1"]

FOSCHI_ONE = math.sqrt(2.0 * math.pi) * 3.0 ** (-1.0 / 12.0)


def foschi_constant(mu: float) -> float:
    """
    Sharp extension constant of the parabola z = mu*y^2/2 with projection measure.

    Args:
        mu: Dilation parameter (> 0)

    Returns:
        (2 pi)^(1/2) 3^(-1/12) mu^(-1/6)
    """
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    return FOSCHI_ONE * mu ** (-1.0 / 6.0)


def foschi_sixth_power(lam: float) -> float:
    """C_F[lam]^6 = (2 pi)^3 / (sqrt(3) lam)."""
    return (2.0 * math.pi) ** 3 / (math.sqrt(3.0) * lam)


def gaussian(y: np.ndarray, lam: float) -> np.ndarray:
    """G0(y) = exp(-lam y^2 / 2)."""
    return np.exp(-0.5 * lam * np.asarray(y, dtype=float) ** 2)


def g0_norm_squared(lam: float) -> float:
    """||G0||_2^2 = (pi / lam)^(1/2)."""
    return math.sqrt(math.pi / lam)


def c_lambda(lam: float) -> float:
    """Normalization of phi(u) = c_lam u exp(-lam u^2/2): (pi / (4 lam^3))^(-1/4)."""
    return (math.pi / (4.0 * lam ** 3)) ** -0.25


def gaussian_closed_forms(which: GaussianKind, lam: float, x, t):
    """
    Evaluate one of the closed-form plane functions.

    Args:
        which: "G1", "G2", "G3" or "phi1"
        lam: Parabola curvature at the vertex (> 0)
        x: Space variable (scalar or array)
        t: Time variable (scalar or array)

    Returns:
        Complex value(s), principal branch of (1 + it)^(-1/2)
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    z = 1.0 + 1j * t
    g1 = np.sqrt(2.0 * np.pi / lam) * z ** -0.5 * np.exp(-x ** 2 / (2.0 * lam * z))

    if which == "G1":
        out = g1
    elif which == "G2":
        out = (z ** -1 / lam - x ** 2 * z ** -2 / lam ** 2) * g1
    elif which == "G3":
        out = (
            3.0 * z ** -2 / lam ** 2
            - 6.0 * x ** 2 * z ** -3 / lam ** 3
            + x ** 4 * z ** -4 / lam ** 4
        ) * g1
    elif which == "phi1":
        out = 1j * c_lambda(lam) / lam * x * z ** -1 * g1
    else:
        raise ValueError(f"unknown closed form {which!r}")
    return out[()] if out.ndim == 0 else out
