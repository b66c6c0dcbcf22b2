"""Quadrature rules shared by the arc, plane and convolution code."""

from typing import Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss


def simpson_weights(n: int, h: float) -> np.ndarray:
    """
    Composite Simpson weights on n uniformly spaced samples.

    Args:
        n: Number of samples (odd, at least 3)
        h: Grid step

    Returns:
        Weight array of length n
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"Simpson's rule needs an odd sample count >= 3, got {n}")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def odd_count(n: int) -> int:
    """Smallest odd integer >= n."""
    return n if n % 2 == 1 else n + 1


def smoothstep(x: np.ndarray) -> np.ndarray:
    """Quintic C2 step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x ** 2)


def gauss_legendre_panels(
    breaks: Sequence[float],
    panel_width: float,
    nodes_per_panel: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes on consecutive intervals [breaks[k], breaks[k+1]].

    Each interval is cut into equal panels no wider than ``panel_width``.

    Args:
        breaks: Increasing interval endpoints
        panel_width: Maximum panel width
        nodes_per_panel: Gauss-Legendre order per panel

    Returns:
        (nodes, weights, segment) where segment[i] is the interval index of node i
    """
    ref_x, ref_w = leggauss(nodes_per_panel)
    nodes, weights, segment = [], [], []
    for k in range(len(breaks) - 1):
        lo, hi = float(breaks[k]), float(breaks[k + 1])
        n_panels = max(1, int(np.ceil((hi - lo) / panel_width - 1e-12)))
        edges = np.linspace(lo, hi, n_panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            nodes.append(a + half * (ref_x + 1.0))
            weights.append(half * ref_w)
            segment.append(np.full(nodes_per_panel, k))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(segment)



def trapezoid_weights(n: int, h: float) -> np.ndarray:
    """Composite trapezoid weights on n uniformly spaced samples."""
    if n < 2:
        raise ValueError(f"the trapezoid rule needs at least 2 samples, got {n}")
    w = np.full(n, h)
    w[[0, -1]] = 0.5 * h
    return w
