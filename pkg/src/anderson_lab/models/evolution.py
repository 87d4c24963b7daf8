"""Evolution configuration models."""

from enum import Enum

from pydantic import BaseModel, Field, model_validator


class EquationKind(str, Enum):
    """Which evolution equation to solve."""

    NLS = "nls"
    WAVE = "wave"
    LINEAR_NLS = "linear-nls"
    LINEAR_WAVE = "linear-wave"


class NonlinearityKind(str, Enum):
    """Gauge-invariant nonlinearities supported by the solvers."""

    CUBIC_DEFOCUSING = "cubic-defocusing"
    CUBIC_FOCUSING = "cubic-focusing"
    POWER = "power"
    BOUNDED = "bounded"
    NONE = "none"


class Scheme(str, Enum):
    """Time-stepping scheme."""

    STRANG = "strang"
    DUHAMEL = "duhamel-fixedpoint"


class ConvergenceMode(str, Enum):
    """Initial-data preparation and metric of an eps-ladder experiment."""

    NLS_DOMAIN = "nls-domain"
    NLS_ENERGY = "nls-energy"
    WAVE = "wave"


class EvolutionConfig(BaseModel):
    """Parameters of one time evolution."""

    equation: EquationKind = EquationKind.NLS
    nonlinearity: NonlinearityKind = NonlinearityKind.CUBIC_DEFOCUSING
    power: float = Field(default=3.0, gt=1, description="Exponent p of |u|^(p-1)u")
    taper_scale: float = Field(default=4.0, gt=0, description="Saturation level of phi")
    dt: float = Field(default=1e-3, gt=0)
    T: float = Field(default=1.0, gt=0)
    scheme: Scheme = Scheme.STRANG
    record_every: int = Field(default=10, ge=1)
    keep_snapshots: bool = False
    blowup_linf: float = Field(default=1e6, gt=0, description="L-infinity abort threshold")
    focusing_mass_limit: float = Field(default=1.0, gt=0, description="Small-data guard")
    picard_tol: float = Field(default=1e-10, gt=0)
    picard_max_iter: int = Field(default=50, ge=1)

    @model_validator(mode="after")
    def _check_horizon(self) -> "EvolutionConfig":
        if self.T < self.dt:
            raise ValueError(f"T={self.T} must be at least dt={self.dt}")
        return self

    @property
    def is_linear(self) -> bool:
        return (
            self.equation in (EquationKind.LINEAR_NLS, EquationKind.LINEAR_WAVE)
            or self.nonlinearity == NonlinearityKind.NONE
        )

    @property
    def is_wave(self) -> bool:
        return self.equation in (EquationKind.WAVE, EquationKind.LINEAR_WAVE)

    @property
    def n_steps(self) -> int:
        return max(1, round(self.T / self.dt))


class GronwallReport(BaseModel):
    """Printed log-Gronwall bound against integrated trajectories of the same ODE."""

    C2: float
    h0: float
    times: list[float]
    bound: list[float]
    from_shifted: list[float] = Field(description="rho(0) = h0 - 1, the bound's own start")
    from_h0: list[float] = Field(description="rho(0) = h0")
    dominates: bool = Field(description="bound >= the shifted trajectory up to solver tolerance")
    bound_at_zero_below_h0: bool = Field(description="bound(0) = h0 - 1 < h0")

    @property
    def from_h0_margin(self) -> float:
        """min_t bound(t) + 1 - rho(t) for the trajectory started at h0; negative past t = 0."""
        return min(b + 1.0 - r for b, r in zip(self.bound, self.from_h0))


class AprioriReport(BaseModel):
    """Trajectory quantities against an a-priori bound."""

    name: str
    values: dict[str, float] = Field(default_factory=dict)
    passed: bool = True


class PhiRow(BaseModel):
    """Distance between two consecutive rungs at one time."""

    t: float
    eps_coarse: float
    eps_fine: float
    phi: float = Field(..., ge=0)


class PhiTable(BaseModel):
    """phi_eps(t) along an eps ladder with the per-time trend verdicts."""

    mode: str
    rows: list[PhiRow] = Field(default_factory=list)
    inversions: dict[float, int] = Field(default_factory=dict)
    decreasing: bool = True


class OrderFit(BaseModel):
    """Least-squares slope of log drift against log dt."""

    dts: list[float]
    drifts: list[float]
    slope: float
