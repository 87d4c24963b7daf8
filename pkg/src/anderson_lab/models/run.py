"""Run configuration and manifest models."""

from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

from .evolution import ConvergenceMode, EvolutionConfig
from .noise import C2Variant
from .torus import TorusSpec

# Open exponent windows per dimension: (alpha range, gamma range)
EXPONENT_RANGES: dict[int, dict[str, tuple[float, float]]] = {
    2: {"alpha": (-4.0 / 3.0, -1.0), "gamma": (2.0 / 3.0, 1.0)},
    3: {"alpha": (0.0, 0.5), "gamma": (1.0, 1.5)},
}

DEFAULT_EXPONENTS: dict[int, dict[str, float]] = {
    2: {"alpha": -1.1, "gamma": 0.9, "beta": 0.4},
    3: {"alpha": 0.45, "gamma": 1.2, "beta": 0.4},
}


class GVariant(str, Enum):
    """Assembly of the remainder term G in the paracontrolled operator."""

    DERIVED = "derived"
    PRINTED = "printed"


class NoiseSection(BaseModel):
    """Noise realization and regularization ladder."""

    seed: int = Field(default=1, ge=0)
    eps: list[float] = Field(default_factory=lambda: [0.25, 0.125, 0.0625])
    mollifier: str = "bump"
    symbol_scale: Optional[float] = Field(
        default=None, gt=0, description="Scale of |k|^2 in the constants (default 4 pi^2)"
    )
    c2_variant: C2Variant = C2Variant.PRINTED
    zero_noise: bool = False

    @model_validator(mode="after")
    def _check_eps(self) -> "NoiseSection":
        if not self.eps or any(e <= 0 for e in self.eps):
            raise ValueError("eps ladder must be a non-empty list of positive values")
        return self


class ExponentSection(BaseModel):
    """Regularity exponents; unset values take the per-dimension defaults."""

    alpha: Optional[float] = None
    gamma: Optional[float] = None
    beta: Optional[float] = None


class OperatorSection(BaseModel):
    """Operator construction parameters."""

    margin: float = Field(default=1.0, gt=0)
    N: Optional[int] = Field(default=None, ge=0, description="Cutoff level; auto if unset")
    target_contraction: float = Field(default=0.5, gt=0, lt=1)
    calibration_samples: int = Field(default=20, ge=1)
    holdout_samples: int = Field(default=20, ge=1)
    g_variant: GVariant = GVariant.DERIVED
    probe_count: int = Field(default=4, ge=1)
    power_iterations: int = Field(default=100, ge=1)


class DataSection(BaseModel):
    """Random initial data shared by every rung."""

    amplitude: float = Field(default=0.5, gt=0, description="Scale sigma of the random data")
    velocity_amplitude: float = Field(default=0.5, ge=0)


class ConvergenceSection(BaseModel):
    """Solution-convergence experiment along the eps ladder."""

    mode: ConvergenceMode = ConvergenceMode.NLS_DOMAIN
    times: list[float] = Field(default_factory=lambda: [0.1, 0.25, 0.5])
    allowed_inversions: int = Field(default=0, ge=0)
    order_dts: list[float] = Field(
        default_factory=lambda: [0.004, 0.002, 0.001, 0.0005],
        description="dt sweep of the energy-drift order test",
    )


class CheckSection(BaseModel):
    """Oracle sizes of the check command; the defaults are the acceptance sizes."""

    bony_samples: int = Field(default=200, ge=1)
    d_oracle_samples: int = Field(default=50, ge=1)
    agreement_samples: int = Field(default=20, ge=1)
    symmetry_pairs: int = Field(default=20, ge=1)
    gamma_samples: int = Field(default=100, ge=1)
    inequality_samples: int = Field(default=100, ge=1)
    sweep_samples: int = Field(default=100, ge=1)
    renorm_eps: list[float] = Field(
        default_factory=lambda: [2.0**-j for j in range(3, 8)],
        description="eps ladder of the renormalization asymptotics; the last three rungs count",
    )
    order_dts: list[float] = Field(
        default_factory=lambda: [0.001, 0.0005, 0.00025],
        description="dt sweep of the energy-order and E~ identity checks",
    )

    @model_validator(mode="after")
    def _check_ladders(self) -> "CheckSection":
        if len(self.renorm_eps) < 3 or any(not 0 < e < 1 for e in self.renorm_eps):
            raise ValueError("renorm_eps needs at least three values in (0, 1)")
        if len(self.order_dts) < 2 or any(dt <= 0 for dt in self.order_dts):
            raise ValueError("order_dts needs at least two positive steps")
        return self


class OutputSection(BaseModel):
    """Where and how artifacts are written."""

    directory: Optional[Path] = None
    snapshot_format: str = Field(default="text", pattern="^(text|binary)$")
    write_fields: bool = True


class RunConfig(BaseModel):
    """Complete configuration of one CLI run."""

    torus: TorusSpec
    noise: NoiseSection = Field(default_factory=NoiseSection)
    exponents: ExponentSection = Field(default_factory=ExponentSection)
    operator: OperatorSection = Field(default_factory=OperatorSection)
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    data: DataSection = Field(default_factory=DataSection)
    convergence: ConvergenceSection = Field(default_factory=ConvergenceSection)
    check: CheckSection = Field(default_factory=CheckSection)
    output: OutputSection = Field(default_factory=OutputSection)
    allow_out_of_range_exponents: bool = False

    @model_validator(mode="after")
    def _fill_and_check_exponents(self) -> "RunConfig":
        defaults = DEFAULT_EXPONENTS[self.torus.dim]
        for name, value in defaults.items():
            if getattr(self.exponents, name) is None:
                setattr(self.exponents, name, value)
        if not self.allow_out_of_range_exponents:
            for name, (lo, hi) in EXPONENT_RANGES[self.torus.dim].items():
                value = getattr(self.exponents, name)
                if not lo < value < hi:
                    raise ValueError(
                        f"{name}={value} outside ({lo:.4g}, {hi:.4g}) for d={self.torus.dim}; "
                        "pass --allow-out-of-range-exponents to override"
                    )
        return self

    @property
    def alpha(self) -> float:
        assert self.exponents.alpha is not None
        return self.exponents.alpha

    @property
    def gamma(self) -> float:
        assert self.exponents.gamma is not None
        return self.exponents.gamma

    @property
    def beta(self) -> float:
        assert self.exponents.beta is not None
        return self.exponents.beta


class CheckResult(BaseModel):
    """Outcome of one invariant check."""

    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


class RunManifest(BaseModel):
    """Index of everything a run produced."""

    config_hash: str
    run_hash: str = ""
    command: str
    config: RunConfig
    versions: dict[str, str] = Field(default_factory=dict)
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    wall_time: float = 0.0
    warnings: list[str] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)
    records: dict[str, Any] = Field(default_factory=dict)
