"""noise command: sample and enhance the noise along the eps ladder."""

import logging
import math
from typing import Optional, cast

from ..models.operator import LadderTable
from ..noise.enhance import EnhancedNoise2D, EnhancedNoise3D
from ..noise.mollifiers import get_mollifier
from ..noise.renorm import direct_lattice_sum
from ..operators.diagnostics import ladder_table
from ..spectral.lattice import FourierField
from ..spectral.snapshot import SnapshotFormat
from ..storage.artifacts import Cell, finite_or_none
from .base import ExperimentFlow
from .rungs import Noise, map_rungs, noise_regularity, noise_task

logger = logging.getLogger(__name__)

CONSTANT_COLUMNS = {
    2: ["eps", "c_eps", "c_eps_direct", "c_eps_over_log"],
    3: ["eps", "c1_eps", "c2_eps", "c1_eps_direct", "eps_c1_eps"],
}

LADDER_COLUMNS = ["eps_coarse", "eps_fine", "difference"]

# Relative agreement of the shell sums with the mode-by-mode sum
DIRECT_SUM_RTOL = 1e-10


def _log_ratio(c: float, eps: float) -> Optional[float]:
    return finite_or_none(c / math.log(1.0 / eps)) if eps < 1.0 else None


def second_field(noise: Noise) -> tuple[str, FourierField]:
    """Name and field of the first renormalized product: Xi2 in 2-d, X1 in 3-d."""
    if isinstance(noise, EnhancedNoise2D):
        return "Xi2", noise.Xi2
    return "X1", noise.X1


class NoiseFlow(ExperimentFlow):
    """Renormalization constants, noise ladders and serialized enhanced noise."""

    command = "noise"

    def constants_rows(self, noises: list[Noise]) -> list[dict[str, Cell]]:
        """One row per rung with the shell-summed and directly summed constants."""
        section = self.config.noise
        m = get_mollifier(section.mollifier)
        rows: list[dict[str, Cell]] = []
        for noise in noises:
            direct = direct_lattice_sum(noise.spec, noise.eps, m, section.symbol_scale)
            if isinstance(noise, EnhancedNoise2D):
                rows.append(
                    {
                        "eps": noise.eps,
                        "c_eps": noise.c_eps,
                        "c_eps_direct": direct,
                        "c_eps_over_log": _log_ratio(noise.c_eps, noise.eps),
                    }
                )
                summed = noise.c_eps
            else:
                rows.append(
                    {
                        "eps": noise.eps,
                        "c1_eps": noise.c1,
                        "c2_eps": noise.c2,
                        "c1_eps_direct": direct,
                        "eps_c1_eps": noise.eps * noise.c1,
                    }
                )
                summed = noise.c1
            gap = abs(summed - direct) / max(abs(direct), 1e-300)
            if gap > DIRECT_SUM_RTOL:
                logger.warning(
                    f"Shell sum and direct lattice sum disagree at eps={noise.eps:g}: {gap:.3e}"
                )
        return rows

    def ladders(self, noises: list[Noise]) -> list[LadderTable]:
        eps_list = [n.eps for n in noises]
        xi_exponent = noise_regularity(self.config) - self.config.torus.dim / 2.0
        tables = [ladder_table([n.xi for n in noises], eps_list, xi_exponent, "xi")]
        name, _ = second_field(noises[0])
        # Xi2 is in C^{2 alpha + 2}, X1 in C^{2 alpha}
        second_exponent = 2.0 * self.config.alpha - self.config.torus.dim / 2.0
        if isinstance(noises[0], EnhancedNoise2D):
            second_exponent += 2.0
        tables.append(
            ladder_table(
                [second_field(n)[1] for n in noises], eps_list, second_exponent, name
            )
        )
        return tables

    def write_fields(self, noises: list[Noise]) -> None:
        fmt = cast(SnapshotFormat, self.config.output.snapshot_format)
        for i, noise in enumerate(noises):
            self.store.write_field(f"xi_{i}", noise.xi, fmt)
            self.store.write_field(f"X_{i}", noise.X, fmt)
            name, f = second_field(noise)
            self.store.write_field(f"{name}_{i}", f, fmt)
            if isinstance(noise, EnhancedNoise3D):
                self.store.write_field(f"X2_{i}", noise.X2, fmt)

    def run(self) -> None:
        noises = map_rungs(noise_task, self.config, self.eps_list, self.workers)
        dim = self.config.torus.dim
        self.store.write_table("constants", self.constants_rows(noises), CONSTANT_COLUMNS[dim])
        for table in self.ladders(noises):
            rows: list[dict[str, Cell]] = [
                {c: getattr(row, c) for c in LADDER_COLUMNS} for row in table.rows
            ]
            self.store.write_table(f"ladder_{table.norm}", rows, LADDER_COLUMNS)
            self.state.records[f"ladder_{table.norm}"] = {
                "inversions": table.inversions,
                "decreasing": table.decreasing,
            }
        if self.config.output.write_fields:
            self.write_fields(noises)
        truncated = [n.eps for n in noises if n.truncated]
        if truncated:
            logger.warning(f"Mollifier support exceeds the lattice at eps {truncated}")
        self.state.records["noise"] = [n.record().model_dump(mode="json") for n in noises]
