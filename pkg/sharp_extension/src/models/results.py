"""Report models returned by the numerical modules and written by the CLI."""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .specs import Cap


class K2Report(BaseModel):
    """Outcome of the kappa'' < (3/2) kappa^3 check at curvature minima."""

    holds: bool
    margin: float
    minima: List[float] = Field(default_factory=list)
    endpoint_minimum: bool = False
    kappa_min: float


class L6Estimate(BaseModel):
    """Extrapolated L6 norm of an extension."""

    value: float
    error_estimate: float
    truncation_gap: float
    fit_error: float = 0.0
    radii: Tuple[float, float, float]
    partial_integrals: Tuple[float, float, float]
    extrapolated_integral: float
    tail_coefficient: float
    under_resolved: bool = False


class SupLimitRow(BaseModel):
    """Sup of the triple autoconvolution density for one cap radius."""

    radius: float
    sup: float
    implied_norm: float


class SupLimitReport(BaseModel):
    """Radii sweep of the cap triple autoconvolution sup and its r -> 0 limit."""

    center: float
    kappa_center: float
    rows: List[SupLimitRow]
    limit: float
    implied_norm: float
    expected_limit: float
    monotone: bool


class ClosedFormPair(BaseModel):
    """A numerically evaluated quantity next to its closed form."""

    name: str
    numeric: float
    closed_form: float
    abs_error: float
    rel_error: Optional[float] = None


class Appendix2Report(BaseModel):
    """Explicit Gaussian plane integrals behind the second variation."""

    lam: float
    a: float
    pairs: List[ClosedFormPair]


class XiRow(BaseModel):
    """One evaluation of the trial-family deficit."""

    epsilon: float
    xi: float
    l2_term: float
    l6_term: float
    l6_error: float


class XiScanReport(BaseModel):
    """Deficit values along a set of epsilons with the second central difference."""

    lam: float
    a: float
    rows: List[XiRow]
    second_difference: Optional[float] = None
    predicted_second_derivative: float


class CompareReport(BaseModel):
    """Strict comparison of a lower bound for C[Gamma] with C_F[lambda]."""

    lambda_min: float
    lambda_reference: float
    C_F_lambda: float
    C_hat_gamma_lower: float
    error_estimate: float
    margin: float
    strict: bool
    trial_epsilon: float
    iterations: int


class DecompositionStepReport(BaseModel):
    """One step of the cap decomposition, as written to the JSON report."""

    step: int
    cap: Cap
    eps_star: float
    l2_mass: float
    triple_norm: float
    lower_bound: float
    upper_bound: float
    sandwich_holds: bool
    threshold: float


class ConcentrationReport(BaseModel):
    """Best small-cap mass fractions of a sequence of functions."""

    radii: List[float]
    fractions: List[List[float]]
    concentrated: bool
    center: float
    kappa_at_center: float
    lambda_min: float
    at_curvature_minimum: bool


class SearchTraceRow(BaseModel):
    """One line of the ascent trace."""

    iteration: int
    rayleigh: float
    l6_error_estimate: float
    damping: float


class SequenceReport(BaseModel):
    """Diffuse-versus-concentrating classification of an iterate sequence."""

    classification: str
    concentration: ConcentrationReport
    tail_height: List[float]
    tail_space: List[float]
    R_values: List[float]


class CapFunctionalResult(BaseModel):
    """Maximizer of |C|^(-1/4) * integral over C of |f|^(3/2) on the cap lattice."""

    cap: Cap
    value: float


class UpperProfile(BaseModel):
    """Height and space tails of a function relative to a cap."""

    cap: Cap
    R_values: List[float]
    tail_height: List[float]
    tail_space: List[float]
