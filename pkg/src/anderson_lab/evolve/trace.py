"""Append-only record of one time evolution."""

from dataclasses import dataclass, field
from typing import Optional

from ..spectral.lattice import FourierField

TRACE_COLUMNS = ("t", "mass", "energy", "tilde_energy", "linf", "h_norm", "phi_eps")


@dataclass
class EvolutionTrace:
    """Time series recorded every `record_every` steps.

    Attributes:
        times: Recording times
        mass: ||u(t)||_{L^2}^2
        energy: E(u(t))
        tilde_energy: E~(d_t u(t)) for wave runs
        linf: ||u(t)||_inf
        h_norm: ||H u(t)||_{L^2}
        phi_eps: Convergence metric against a reference run, filled by comparisons
        snapshots: u(t) when kept
        velocities: d_t u(t) for wave runs when kept
        tilde_source: 3-d integrand int g''(u) (d_t u)^3 / 2 of the E~ identity (wave)
    """

    times: list[float] = field(default_factory=list)
    mass: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    tilde_energy: list[float] = field(default_factory=list)
    linf: list[float] = field(default_factory=list)
    h_norm: list[float] = field(default_factory=list)
    phi_eps: list[float] = field(default_factory=list)
    snapshots: list[FourierField] = field(default_factory=list)
    velocities: list[FourierField] = field(default_factory=list)
    tilde_source: list[float] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.times)

    def rows(self) -> list[dict[str, Optional[float]]]:
        """One dict per recorded time, None where a column does not apply."""

        def at(series: list[float], i: int) -> Optional[float]:
            return series[i] if i < len(series) else None

        return [
            {
                "t": t,
                "mass": at(self.mass, i),
                "energy": at(self.energy, i),
                "tilde_energy": at(self.tilde_energy, i),
                "linf": at(self.linf, i),
                "h_norm": at(self.h_norm, i),
                "phi_eps": at(self.phi_eps, i),
            }
            for i, t in enumerate(self.times)
        ]

    def index_at(self, t: float) -> int:
        """Index of the recorded time closest to t."""
        return min(range(len(self.times)), key=lambda i: abs(self.times[i] - t))
