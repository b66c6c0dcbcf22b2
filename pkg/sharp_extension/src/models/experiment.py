"""Experiment configuration read by the command-line driver, and run summaries."""

from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ...config import settings
from .specs import CurveSpec, DecompositionParams, L6Control, SearchParams


class GridConfig(BaseModel):
    """Arc sampling and the default plane rule."""

    arc_n: int = Field(default_factory=lambda: settings.default_arc_samples, ge=65)
    l6: L6Control = Field(default_factory=L6Control)


class FoschiBlock(BaseModel):
    arc_n: int = Field(default=8193, ge=65)
    mu_values: List[float] = Field(default=[1.0, 2.0], min_length=1)
    halfwidth_gaussians: float = Field(default=6.0, gt=0.0)
    tolerance: float = Field(default=1e-3, gt=0.0)
    scaling_tolerance: float = Field(default=1e-3, gt=0.0)


class TripleLimitBlock(BaseModel):
    center: Optional[float] = None
    radii: List[float] = Field(default=[0.2, 0.1, 0.05], min_length=3)
    tolerance: float = Field(default=0.02, gt=0.0)
    norm_tolerance: float = Field(default=0.01, gt=0.0)
    mc_samples: int = Field(default=0, ge=0)


class Appendix2Block(BaseModel):
    lambdas: List[float] = Field(default=[0.5, 1.0, 2.0], min_length=1)
    a: float = 1.0
    rel_tolerance: float = Field(default=1e-5, gt=0.0)
    abs_tolerance: float = Field(default=1e-8, gt=0.0)


class XiScanBlock(BaseModel):
    epsilons: List[float] = Field(default=[0.05, 0.1, 0.15], min_length=1)
    tolerance: float = Field(default=0.1, gt=0.0)
    sign_epsilon: float = Field(default=0.1, gt=0.0, le=0.5)

    @field_validator("epsilons")
    @classmethod
    def _range(cls, value: List[float]) -> List[float]:
        if any(not 0.0 < e <= 0.5 for e in value):
            raise ValueError("epsilons must lie in (0, 0.5]")
        return value


class DecomposeBlock(BaseModel):
    params: DecompositionParams = Field(default_factory=lambda: DecompositionParams(c_estimate=3.0))
    centers: Tuple[float, float] = (0.3, 0.7)
    radius: float = Field(default=0.08, gt=0.0, lt=0.5)
    heights: Tuple[float, float] = (1.0, 0.6)


class CapMetricBlock(BaseModel):
    triples: int = Field(default=1000, ge=1)
    pair_count: int = Field(default=5, ge=3)
    triangle_tolerance: float = Field(default=1e-12, ge=0.0)


class SearchBlock(BaseModel):
    arc_n: int = Field(default=2049, ge=65)
    params: SearchParams = Field(default_factory=lambda: SearchParams(
        l6=L6Control(radii=(8.0, 12.0, 16.0), angle_nodes=128),
    ))
    bump_radius: float = Field(default=2.0, gt=0.0)
    tolerance: float = Field(default=2e-3, gt=0.0)


class CompareBlock(BaseModel):
    arc_n: int = Field(default=8193, ge=65)
    params: SearchParams = Field(default_factory=lambda: SearchParams(max_iters=4))
    epsilon: float = Field(default=0.15, gt=0.0, le=0.5)
    reference_lambda: Optional[float] = Field(default=None, gt=0.0)


class DiagnoseBlock(BaseModel):
    center: Optional[float] = None
    scales: List[float] = Field(default=[8.0, 16.0, 32.0, 64.0, 128.0], min_length=3)
    expect: Optional[str] = Field(default=None, pattern="^(diffuse|concentrating)$")
    expect_at_minimum: Optional[bool] = None


class ExperimentConfig(BaseModel):
    """A full experiment: the curve, the grids, the seed and the per-command blocks."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    curve: Optional[CurveSpec] = None
    grids: GridConfig = Field(default_factory=GridConfig)
    seed: Optional[int] = None
    verify_foschi: FoschiBlock = Field(default_factory=FoschiBlock, alias="verify-foschi")
    triple_limit: TripleLimitBlock = Field(default_factory=TripleLimitBlock, alias="triple-limit")
    appendix2: Appendix2Block = Field(default_factory=Appendix2Block)
    xi_scan: XiScanBlock = Field(default_factory=XiScanBlock, alias="xi-scan")
    decompose: DecomposeBlock = Field(default_factory=DecomposeBlock)
    cap_metric: CapMetricBlock = Field(default_factory=CapMetricBlock, alias="cap-metric")
    search: SearchBlock = Field(default_factory=SearchBlock)
    compare: CompareBlock = Field(default_factory=CompareBlock)
    diagnose: DiagnoseBlock = Field(default_factory=DiagnoseBlock)


class Criterion(BaseModel):
    """One pass/fail check with the measured value and its tolerance."""

    name: str
    value: float
    tolerance: float
    passed: bool


class RunSummary(BaseModel):
    """JSON summary written after a successful command."""

    command: str
    passed: bool
    criteria: List[Criterion]
    results: Dict[str, Any]
    config: Dict[str, Any]
