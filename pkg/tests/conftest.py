"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from sharp_extension.src.geometry.arc_geometry import build_arc
from sharp_extension.src.models.specs import (
    CircleSpec,
    CurvatureSamplesSpec,
    L6Control,
    ParabolaSpec,
    PerturbedParabolaSpec,
)


@pytest.fixture(scope="session")
def circle_arc():
    """Unit-circle arc of length 1.5."""
    return build_arc(CircleSpec(radius=1.0, extent=1.5), 1025)


@pytest.fixture(scope="session")
def oval_arc():
    """kappa(s) = 1 + (s - 0.75)^2 / 2 on [0, 1.5]; single interior minimum at s = 0.75."""
    s = np.linspace(0.0, 1.5, 301)
    spec = CurvatureSamplesSpec(kappa=(1.0 + 0.5 * (s - 0.75) ** 2).tolist(), length=1.5)
    return build_arc(spec, 2049)


@pytest.fixture(scope="session")
def parabola_spec():
    return ParabolaSpec(mu=1.0, halfwidth=4.0)


@pytest.fixture(scope="session")
def parabola_arc(parabola_spec):
    """y^2/2 over [-4, 4]."""
    return build_arc(parabola_spec, 2049)


@pytest.fixture(scope="session")
def gaussian_parabola_arc():
    """y^2/2 over [-6, 6], wide enough for G0 to vanish at the ends."""
    return build_arc(ParabolaSpec(mu=1.0, halfwidth=6.0), 2049)


@pytest.fixture(scope="session")
def perturbed_spec():
    return PerturbedParabolaSpec(lam=1.0, a=0.125, halfwidth=0.75)


@pytest.fixture(scope="session")
def perturbed_arc(perturbed_spec):
    return build_arc(perturbed_spec, 4097)


@pytest.fixture
def coarse_l6():
    """Small plane rule for quick ascent checks."""
    return L6Control(radii=(8.0, 12.0, 16.0), angle_nodes=128)
