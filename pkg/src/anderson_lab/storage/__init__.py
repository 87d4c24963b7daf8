"""Run directories and the run registry."""

from .artifacts import RunStore, finite_or_none, format_cell, parse_cell
from .registry import RunRegistry, RunRow

__all__ = [
    "RunRegistry",
    "RunRow",
    "RunStore",
    "finite_or_none",
    "format_cell",
    "parse_cell",
]
