"""Records produced by the operator modules."""

from typing import Optional

from pydantic import BaseModel, Field

from .torus import NormReport


class BundleRecord(BaseModel):
    """Manifest record of a shifted operator bundle."""

    dim: int
    K: int
    seed: int
    eps: float
    N: int = Field(..., ge=0)
    contraction: float = Field(..., ge=0)
    K_Xi: float
    C_Xi: float
    lambda_min: float
    lambda_max: float
    hermitian_defect: float


class LadderRow(BaseModel):
    """Difference between two consecutive rungs of an eps ladder."""

    eps_coarse: float
    eps_fine: float
    difference: float = Field(..., ge=0)
    operator_proxy: Optional[float] = None


class LadderTable(BaseModel):
    """Consecutive-rung differences with the monotonicity verdict."""

    norm: str
    rows: list[LadderRow] = Field(default_factory=list)
    inversions: int = 0
    decreasing: bool = True


class InequalityReport(BaseModel):
    """Maxima of functional-inequality ratios over a sample set."""

    samples: int = Field(..., ge=0)
    brezis_gallouet: float = 0.0
    lp_ratios: dict[int, float] = Field(default_factory=dict)
    linf_domain: float = 0.0
    agmon: Optional[float] = None


class ZProductReport(BaseModel):
    """Two evaluations of e^{2W}(1 - Lap)Z and their disagreement."""

    direct: NormReport
    split: NormReport
    difference: float = Field(..., ge=0, description="L2 norm of direct - split")
    relative: float = Field(..., ge=0)
    paralinear_remainder: float = Field(
        ..., ge=0, description="C^{2 alpha} norm of the remainder of e^{2X} = 2e^{2X} < X + R"
    )
