"""Experiment flows behind the CLI commands."""

from .base import ExperimentFlow, WarningCollector
from .check_flow import CheckFlow
from .converge_flow import ConvergeFlow
from .noise_flow import NoiseFlow
from .operator_flow import OperatorFlow
from .rungs import bundle_task, map_rungs, noise_task, with_common_shift
from .solve_flow import SolveFlow

FLOWS: dict[str, type[ExperimentFlow]] = {
    "noise": NoiseFlow,
    "operator": OperatorFlow,
    "solve": SolveFlow,
    "converge": ConvergeFlow,
    "check": CheckFlow,
}

__all__ = [
    "FLOWS",
    "CheckFlow",
    "ConvergeFlow",
    "ExperimentFlow",
    "NoiseFlow",
    "OperatorFlow",
    "SolveFlow",
    "WarningCollector",
    "bundle_task",
    "map_rungs",
    "noise_task",
    "with_common_shift",
]
