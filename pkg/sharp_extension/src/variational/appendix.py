"""Explicit Gaussian plane integrals entering the second derivative of the deficit.

Each integral is evaluated by adaptive 2-D quadrature in the coordinates
t = tan(alpha), x = y (1 + t^2)^(1/2) over alpha in (-pi/2, pi/2) and
|y| <= 10 lam^(1/2), and paired with its closed form.
"""

import logging
import math
import warnings
from typing import Callable, List, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, dblquad

from ...errors import NumericalFailure
from ..extension.gaussians import foschi_sixth_power, gaussian_closed_forms
from ..models.results import Appendix2Report, ClosedFormPair

logger = logging.getLogger(__name__)

Y_REACH = 10.0
EPSABS = 1e-12
EPSREL = 1e-11


def _compact_integral(integrand: Callable[[float, float], float], lam: float, name: str) -> float:
    """Integral of integrand(x, t) dx dt over the plane."""
    reach = Y_REACH * math.sqrt(lam)

    def pulled_back(y: float, alpha: float) -> float:
        t = math.tan(alpha)
        stretch = math.sqrt(1.0 + t * t)
        return integrand(y * stretch, t) * stretch ** 3

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error = dblquad(
                pulled_back, -0.5 * math.pi, 0.5 * math.pi, -reach, reach,
                epsabs=EPSABS, epsrel=EPSREL,
            )
        except IntegrationWarning as e:
            logger.error(f"quadrature of {name} did not converge at lambda={lam}: {e}")
            raise NumericalFailure(f"adaptive quadrature of {name} did not converge", {"lambda": lam, "integral": name}) from e
    logger.debug(f"{name}(lambda={lam}) = {value:.15g} (+/- {error:.2e})")
    return value


def _weight(lam: float, x: float, t: float) -> float:
    return math.exp(-3.0 * x * x / (lam * (1.0 + t * t)))


def _pair(name: str, numeric: float, closed: float) -> ClosedFormPair:
    error = abs(numeric - closed)
    relative: Optional[float] = error / abs(closed) if closed != 0.0 else None
    return ClosedFormPair(name=name, numeric=numeric, closed_form=closed, abs_error=error, rel_error=relative)


def appendix2_integrals(lam: float, a: float) -> Appendix2Report:
    """
    Numeric and closed-form values of the Gaussian plane integrals.

    Pairs, with e = exp(-3 x^2 / (lam (1 + t^2))):

    - I:         iint (1+t^2)^(-5/2) e                    = pi^(3/2) lam^(1/2) / (2 sqrt 3)
    - II:        iint x^2 (1-t^2) (1+t^2)^(-7/2) e        = 0
    - III:       iint (4t^2-4t^4) (1+t^2)^(-11/2) x^4 e   = -pi^(3/2) lam^(5/2) / (12 sqrt 3)
    - claim2.I:  iint 2t^2 (1+t^2)^(-7/2) e               = pi^(3/2) lam^(1/2) / (4 sqrt 3)
    - claim2.II: iint (3t^2-t^4) (1+t^2)^(-9/2) x^2 e     = 0
    - claim1:    3 lam^2 Re iint |G1|^4 conj(G1) G2       = (3/2) pi^(3/2) lam^(-1/2) C_F^6
    - claim2:    -6a iint Re{i t |G1|^4 conj(G1) G3}      = -4a pi^(3/2) lam^(-7/2) C_F^6

    Args:
        lam: Parabola curvature (> 0)
        a: Quartic coefficient

    Returns:
        Appendix2Report

    Raises:
        NumericalFailure: the adaptive quadrature does not converge
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    c6 = foschi_sixth_power(lam)
    root = math.pi ** 1.5 / math.sqrt(3.0)

    def g_product(x: float, t: float, which: str) -> complex:
        g1 = complex(gaussian_closed_forms("G1", lam, x, t))
        other = complex(gaussian_closed_forms(which, lam, x, t))
        return abs(g1) ** 4 * np.conj(g1) * other

    integrals = [
        ("I", lambda x, t: (1.0 + t * t) ** -2.5 * _weight(lam, x, t),
         root * lam ** 0.5 / 2.0),
        ("II", lambda x, t: x * x * (1.0 - t * t) * (1.0 + t * t) ** -3.5 * _weight(lam, x, t),
         0.0),
        ("III", lambda x, t: (4.0 * t * t - 4.0 * t ** 4) * (1.0 + t * t) ** -5.5 * x ** 4 * _weight(lam, x, t),
         -root * lam ** 2.5 / 12.0),
        ("claim2.I", lambda x, t: 2.0 * t * t * (1.0 + t * t) ** -3.5 * _weight(lam, x, t),
         root * lam ** 0.5 / 4.0),
        ("claim2.II", lambda x, t: (3.0 * t * t - t ** 4) * (1.0 + t * t) ** -4.5 * x * x * _weight(lam, x, t),
         0.0),
        ("claim1", lambda x, t: 3.0 * lam ** 2 * g_product(x, t, "G2").real,
         1.5 * math.pi ** 1.5 * lam ** -0.5 * c6),
        ("claim2", lambda x, t: -6.0 * a * (1j * t * g_product(x, t, "G3")).real,
         -4.0 * a * math.pi ** 1.5 * lam ** -3.5 * c6),
    ]

    pairs: List[ClosedFormPair] = []
    for name, integrand, closed in integrals:
        if name == "claim2" and a == 0.0:
            pairs.append(_pair(name, 0.0, 0.0))
            continue
        pairs.append(_pair(name, _compact_integral(integrand, lam, name), closed))
    logger.info(
        "appendix integrals at lambda=%s: %s", lam,
        ", ".join(f"{p.name}={p.numeric:.10g}" for p in pairs),
    )
    return Appendix2Report(lam=lam, a=a, pairs=pairs)
