"""Data models for Anderson Lab."""

from .evolution import (
    AprioriReport,
    ConvergenceMode,
    EquationKind,
    EvolutionConfig,
    GronwallReport,
    NonlinearityKind,
    OrderFit,
    PhiRow,
    PhiTable,
    Scheme,
)
from .flow_state import ExecutionStatus, FlowState
from .noise import C2Variant, NoiseRecord
from .operator import (
    BundleRecord,
    InequalityReport,
    LadderRow,
    LadderTable,
    ZProductReport,
)
from .run import (
    DEFAULT_EXPONENTS,
    EXPONENT_RANGES,
    CheckResult,
    ConvergenceSection,
    DataSection,
    ExponentSection,
    GVariant,
    NoiseSection,
    OperatorSection,
    OutputSection,
    RunConfig,
    RunManifest,
)
from .sweep import RatioSweep, ResolutionComparison
from .torus import BlockNorm, NormReport, TorusSpec, default_grid_n

__all__ = [
    # Torus
    "BlockNorm",
    "NormReport",
    "TorusSpec",
    "default_grid_n",
    # Noise
    "C2Variant",
    "NoiseRecord",
    # Operators
    "BundleRecord",
    "InequalityReport",
    "LadderRow",
    "LadderTable",
    "ZProductReport",
    "RatioSweep",
    "ResolutionComparison",
    # Evolution
    "AprioriReport",
    "ConvergenceMode",
    "EquationKind",
    "EvolutionConfig",
    "GronwallReport",
    "NonlinearityKind",
    "OrderFit",
    "PhiRow",
    "PhiTable",
    "Scheme",
    # Runs
    "DEFAULT_EXPONENTS",
    "EXPONENT_RANGES",
    "CheckResult",
    "ConvergenceSection",
    "DataSection",
    "ExponentSection",
    "GVariant",
    "NoiseSection",
    "OperatorSection",
    "OutputSection",
    "RunConfig",
    "RunManifest",
    # Flows
    "ExecutionStatus",
    "FlowState",
]
