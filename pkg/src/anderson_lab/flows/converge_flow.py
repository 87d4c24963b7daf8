"""converge command: solution convergence along the eps ladder."""

import logging
from typing import cast

from ..errors import ConfigError
from ..evolve.convergence import convergence_experiment
from ..evolve.trace import TRACE_COLUMNS, EvolutionTrace
from ..models.evolution import ConvergenceMode, PhiTable
from ..spectral.snapshot import SnapshotFormat
from ..storage.artifacts import Cell
from .base import ExperimentFlow
from .rungs import bundle_task, map_rungs, with_common_shift
from .solve_flow import trace_rows

logger = logging.getLogger(__name__)

PHI_COLUMNS = ["t", "eps_coarse", "eps_fine", "phi"]
TREND_COLUMNS = ["t", "inversions", "decreasing"]


class ConvergeFlow(ExperimentFlow):
    """phi_eps(t) between consecutive rungs sharing one noise realization and one shift."""

    command = "converge"

    def validate(self) -> None:
        """Raises ConfigError when mode, equation and sample times do not fit together."""
        section = self.config.convergence
        evolution = self.config.evolution
        mode = ConvergenceMode(section.mode)
        if (mode is ConvergenceMode.WAVE) != evolution.is_wave:
            raise ConfigError(
                f"Convergence mode {mode.value} does not match equation {evolution.equation.value}"
            )
        late = [t for t in section.times if t > evolution.T]
        if late:
            raise ConfigError(f"Sample times {late} lie beyond T={evolution.T}")
        if len(self.eps_list) < 2:
            raise ConfigError("Convergence needs at least two eps rungs")

    def write_traces(self, traces: list[EvolutionTrace], table: PhiTable) -> None:
        fmt = cast(SnapshotFormat, self.config.output.snapshot_format)
        for i, trace in enumerate(traces):
            self.store.write_table(f"trace_{i}", trace_rows(trace), TRACE_COLUMNS)
            if not self.config.output.write_fields:
                continue
            for t in table.inversions:
                j = trace.index_at(t)
                self.store.write_field(f"u_{i}_t{j}", trace.snapshots[j], fmt)
                if trace.velocities:
                    self.store.write_field(f"v_{i}_t{j}", trace.velocities[j], fmt)

    def run(self) -> None:
        self.validate()
        config = self.config
        section = config.convergence
        eps_list = sorted(self.eps_list, reverse=True)
        bundles = with_common_shift(map_rungs(bundle_task, config, eps_list, self.workers))
        table, traces = convergence_experiment(
            bundles,
            eps_list,
            config.evolution,
            section.mode,
            section.times,
            config.noise.seed,
            config.data,
            section.allowed_inversions,
        )
        phi_rows: list[dict[str, Cell]] = [
            {c: getattr(row, c) for c in PHI_COLUMNS} for row in table.rows
        ]
        self.store.write_table("phi", phi_rows, PHI_COLUMNS)
        trend_rows: list[dict[str, Cell]] = [
            {"t": t, "inversions": n, "decreasing": n <= section.allowed_inversions}
            for t, n in table.inversions.items()
        ]
        self.store.write_table("phi_trend", trend_rows, TREND_COLUMNS)
        self.write_traces(traces, table)
        self.state.records.update(
            {
                "mode": table.mode,
                "eps": eps_list,
                "K_Xi": bundles[0].K_Xi,
                "decreasing": table.decreasing,
                "inversions": {str(t): n for t, n in table.inversions.items()},
            }
        )
