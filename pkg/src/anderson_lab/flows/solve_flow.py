"""solve command: one NLS or wave run on the finest rung, with its traces and checks."""

import logging
from pathlib import Path
from typing import Optional, cast

from ..evolve.checks import (
    energy_apriori_check,
    nls_domain_apriori_check,
    order_test,
    tilde_growth_check,
)
from ..evolve.data import domain_initial, initial_sharp, initial_velocity
from ..evolve.nls import nls_solve
from ..evolve.trace import TRACE_COLUMNS, EvolutionTrace
from ..evolve.wave import wave_solve
from ..models.evolution import AprioriReport
from ..models.run import RunConfig
from ..operators.bundle import OperatorBundle
from ..spectral.lattice import FourierField
from ..spectral.snapshot import SnapshotFormat
from ..storage.artifacts import Cell
from ..storage.registry import RunRegistry
from .base import ExperimentFlow
from .rungs import bundle_task

logger = logging.getLogger(__name__)

ORDER_COLUMNS = ["dt", "drift"]


def trace_rows(trace: EvolutionTrace) -> list[dict[str, Cell]]:
    return [{k: v for k, v in row.items()} for row in trace.rows()]


def relative_drift(series: list[float]) -> float:
    return abs(series[-1] - series[0]) / max(abs(series[0]), 1e-300)


class SolveFlow(ExperimentFlow):
    """Evolve prepared domain data under the finest operator of the ladder."""

    command = "solve"

    def __init__(
        self,
        config: RunConfig,
        root: Optional[Path] = None,
        registry: Optional[RunRegistry] = None,
        workers: int = 1,
        reuse: bool = True,
        order_test: bool = False,
    ):
        self.with_order_test = order_test
        if order_test:
            self.command = "solve-order-test"
        super().__init__(config, root, registry, workers, reuse)

    @property
    def eps(self) -> float:
        return min(self.eps_list)

    def initial_data(self, bundle: OperatorBundle) -> tuple[FourierField, Optional[FourierField]]:
        """u0 in the domain of H_eps and, for wave runs, the velocity u1."""
        config = self.config
        seed, data = config.noise.seed, config.data
        u0 = domain_initial(bundle, initial_sharp(config.torus, seed, data.amplitude))
        if not config.evolution.is_wave:
            return u0, None
        return u0, initial_velocity(config.torus, seed, data.velocity_amplitude)

    def solve(
        self, bundle: OperatorBundle, u0: FourierField, u1: Optional[FourierField]
    ) -> EvolutionTrace:
        run = self.config.evolution.model_copy(update={"keep_snapshots": True})
        if u1 is not None:
            return wave_solve(bundle, u0, u1, run)
        return nls_solve(bundle, u0, run)

    def apriori(
        self, trace: EvolutionTrace, bundle: OperatorBundle, u0: FourierField
    ) -> list[AprioriReport]:
        if self.config.evolution.is_wave:
            return [tilde_growth_check(trace)]
        return [nls_domain_apriori_check(trace, bundle, u0), energy_apriori_check(trace, bundle)]

    def write_snapshots(self, trace: EvolutionTrace) -> None:
        fmt = cast(SnapshotFormat, self.config.output.snapshot_format)
        for j, u in enumerate(trace.snapshots):
            self.store.write_field(f"u_{j}", u, fmt)
        for j, v in enumerate(trace.velocities):
            self.store.write_field(f"v_{j}", v, fmt)

    def run_order_test(
        self, bundle: OperatorBundle, u0: FourierField, u1: Optional[FourierField]
    ) -> None:
        dts = self.config.convergence.order_dts
        fit = order_test(bundle, u0, self.config.evolution, dts, u1)
        rows: list[dict[str, Cell]] = [
            {"dt": dt, "drift": drift} for dt, drift in zip(fit.dts, fit.drifts)
        ]
        self.store.write_table("order_test", rows, ORDER_COLUMNS)
        self.state.records["order_slope"] = fit.slope

    def run(self) -> None:
        bundle = bundle_task(self.config, self.eps)
        u0, u1 = self.initial_data(bundle)
        trace = self.solve(bundle, u0, u1)
        self.store.write_table("trace", trace_rows(trace), TRACE_COLUMNS)
        if self.config.evolution.keep_snapshots and self.config.output.write_fields:
            self.write_snapshots(trace)
        else:
            self.store.write_field("u_final", trace.snapshots[-1])
        reports = self.apriori(trace, bundle, u0)
        for report in reports:
            if not report.passed:
                logger.warning(f"A-priori check {report.name} failed: {report.values}")
        record = bundle.record(self.config.torus.dim, self.config.noise.seed, self.eps)
        self.state.records.update(
            {
                "eps": self.eps,
                "bundle": record.model_dump(mode="json"),
                "mass_drift": relative_drift(trace.mass),
                "energy_drift": relative_drift(trace.energy),
                "apriori": [r.model_dump(mode="json") for r in reports],
            }
        )
        if self.with_order_test:
            self.run_order_test(bundle, u0, u1)
