"""Second variation Q of the Foschi functional at the Gaussian.

Plane integrals use the compactified coordinates t = tan(alpha),
x = v (1 + t^2)^(1/2), in which dx dt = (1 + t^2)^(3/2) dv dalpha and every
integrand of Q is bounded and smooth on (-pi/2, pi/2) x R.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from ...config import settings
from ...errors import FieldError
from ..extension.extension_operator import evaluate_measure, phase_step
from ..extension.gaussians import c_lambda, foschi_sixth_power, g0_norm_squared, gaussian_closed_forms
from ..fields.arc_function import PointMeasure
from ..geometry.quadrature import simpson_weights

logger = logging.getLogger(__name__)

PLANE_NODES = 200
V_REACH = 8.0


def _moments(A: np.ndarray, x: np.ndarray, degree: int) -> list:
    """m_k = integral of y^k exp(-A y^2 / 2 + i x y) dy for k = 0..degree."""
    m = [np.sqrt(2.0 * np.pi / A) * np.exp(-x ** 2 / (2.0 * A))]
    if degree >= 1:
        m.append(1j * x * m[0] / A)
    for k in range(1, degree):
        m.append((1j * x * m[k] + k * m[k - 1]) / A)
    return m


def _real_moments(A: float, degree: int) -> list:
    """Integral of y^k exp(-A y^2 / 2) dy for k = 0..degree."""
    m = [math.sqrt(2.0 * math.pi / A), 0.0]
    for k in range(1, degree):
        m.append(k * m[k - 1] / A)
    return m[:degree + 1]


@dataclass(frozen=True)
class GaussianPolynomial:
    """phi(y) = P(y) exp(-beta y^2 / 2) with complex polynomial P = sum c_k y^k."""

    coeffs: Tuple[complex, ...]
    beta: float

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.polynomial.polynomial.polyval(y, np.array(self.coeffs)) * np.exp(-0.5 * self.beta * y ** 2)

    def scaled(self, c: complex) -> "GaussianPolynomial":
        return GaussianPolynomial(tuple(c * k for k in self.coeffs), self.beta)

    def extension(self, lam: float, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """phi_1(x, t) = integral of phi(y) exp(i x y - i t lam y^2 / 2) dy."""
        A = self.beta + 1j * lam * np.asarray(t, dtype=float)
        moments = _moments(A, np.asarray(x, dtype=float), self.degree)
        return sum(c * m for c, m in zip(self.coeffs, moments))

    def l2_squared(self) -> float:
        """Integral of |phi|^2."""
        m = _real_moments(2.0 * self.beta, 2 * self.degree)
        total = sum(
            cj * np.conj(ck) * m[j + k]
            for j, cj in enumerate(self.coeffs)
            for k, ck in enumerate(self.coeffs)
        )
        return float(np.real(total))

    def gaussian_pairing(self, lam: float) -> complex:
        """Integral of G0 phi."""
        m = _real_moments(self.beta + lam, self.degree)
        return complex(sum(c * mk for c, mk in zip(self.coeffs, m)))

    @classmethod
    def monomial(cls, lam: float, degree: int, c: complex = 1.0) -> "GaussianPolynomial":
        """c y^degree G0(y)."""
        return cls(tuple([0.0] * degree + [c]), lam)

    @classmethod
    def perturbation(cls, lam: float) -> "GaussianPolynomial":
        """c_lam u exp(-lam u^2 / 2), unit L2 norm and orthogonal to G0."""
        return cls.monomial(lam, 1, c_lambda(lam))


@dataclass(frozen=True, eq=False)
class SampledPhi:
    """phi given by samples on a uniform y-grid (odd count)."""

    y: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.y.shape != self.values.shape or self.y.size % 2 == 0:
            raise FieldError("sampled phi needs matching arrays with an odd sample count")

    @property
    def weights(self) -> np.ndarray:
        return simpson_weights(self.y.size, float(self.y[1] - self.y[0]))

    def scaled(self, c: complex) -> "SampledPhi":
        return SampledPhi(self.y, c * self.values)

    def l2_squared(self) -> float:
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def gaussian_pairing(self, lam: float) -> complex:
        return complex(np.sum(self.weights * np.exp(-0.5 * lam * self.y ** 2) * self.values))

    def extension(self, lam: float, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        measure = PointMeasure(
            np.column_stack([self.y, 0.5 * lam * self.y ** 2]),
            self.values * self.weights,
        )
        targets = np.column_stack([-x.ravel(), t.ravel()])
        step = phase_step(measure, float(np.max(np.abs(x))), float(np.max(np.abs(t))))
        if step > settings.resolution_threshold:
            logger.warning(f"sampled phi under-resolved on the plane rule (phase step {step:.3f})")
        return evaluate_measure(measure, targets, sign=-1.0).reshape(x.shape)


Phi = Union[GaussianPolynomial, SampledPhi]


@lru_cache(maxsize=8)
def compact_plane_rule(lam: float, n_alpha: int = PLANE_NODES, n_v: int = PLANE_NODES):
    """
    Tensor Gauss-Legendre rule on (alpha, v) in (-pi/2, pi/2) x [-8 lam^(1/2), 8 lam^(1/2)].

    Returns:
        (x, t, w) flattened, with the Jacobian folded into w
    """
    ra, wa = leggauss(n_alpha)
    rv, wv = leggauss(n_v)
    alpha = 0.5 * np.pi * ra
    reach = V_REACH * math.sqrt(lam)
    v = reach * rv
    aa, vv = np.meshgrid(alpha, v, indexing="ij")
    t = np.tan(aa)
    stretch = np.sqrt(1.0 + t ** 2)
    x = vv * stretch
    w = np.outer(0.5 * np.pi * wa, reach * wv) * stretch ** 3
    return x.ravel(), t.ravel(), w.ravel()


def q_scale(phi: Phi, lam: float) -> float:
    """C_F[lam]^6 ||G0||_2^4 ||phi||_2^2, the natural size of Q(phi)."""
    return foschi_sixth_power(lam) * g0_norm_squared(lam) ** 2 * phi.l2_squared()


def quadratic_form_Q(phi: Phi, lam: float, n_alpha: int = PLANE_NODES, n_v: int = PLANE_NODES) -> float:
    """
    Q(phi) = 3 C^6 ||G0||^4 int |phi|^2 + 12 C^6 ||G0||^2 (Re int G0 phi)^2
             - 9 iint |G1|^4 |phi_1|^2 - 6 Re iint |G1|^2 conj(G1)^2 phi_1^2

    Args:
        phi: Gaussian-polynomial (closed-form extension) or sampled function
        lam: Parabola curvature
        n_alpha: Gauss-Legendre nodes in the compactified time angle
        n_v: Gauss-Legendre nodes in the rescaled space variable

    Returns:
        Real value of Q
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if isinstance(phi, SampledPhi):
        reach = 8.0 / math.sqrt(lam)
        if phi.y[0] > -reach or phi.y[-1] < reach:
            raise FieldError(f"sampled phi must cover [-{reach:.4g}, {reach:.4g}]")

    c6 = foschi_sixth_power(lam)
    g0 = g0_norm_squared(lam)
    local = 3.0 * c6 * g0 ** 2 * phi.l2_squared() + 12.0 * c6 * g0 * phi.gaussian_pairing(lam).real ** 2

    x, t, w = compact_plane_rule(lam, n_alpha, n_v)
    g1 = gaussian_closed_forms("G1", lam, x, t)
    phi1 = phi.extension(lam, x, t)
    g1_abs2 = np.abs(g1) ** 2
    plane = (
        9.0 * np.sum(w * g1_abs2 ** 2 * np.abs(phi1) ** 2)
        + 6.0 * np.sum(w * (g1_abs2 * np.conj(g1) ** 2 * phi1 ** 2).real)
    )
    return float(local - plane)


def kernel_elements(lam: float) -> Sequence[GaussianPolynomial]:
    """G0, iG0, yG0, iyG0, y^2 G0, iy^2 G0."""
    return [
        GaussianPolynomial.monomial(lam, degree, c)
        for degree in (0, 1, 2)
        for c in (1.0, 1j)
    ]
