"""Solution convergence along an eps ladder sharing one noise realization.

The finest rung stands in for the limit operator. Consecutive rungs are compared with

    NLS:  phi = ||u - u'|| + ||d_t u - d_t u'|| + ||H u - H' u'||
    wave: phi = NLS terms + ||sqrt(-H) d_t u - sqrt(-H') d_t u'||

at the requested times.
"""

import logging
from typing import Optional, Sequence

from ..models.evolution import ConvergenceMode, EvolutionConfig, PhiRow, PhiTable
from ..models.run import DataSection
from ..operators.bundle import OperatorBundle, neg_h_power
from ..operators.diagnostics import count_inversions
from ..spectral.lattice import FourierField, l2_norm
from .data import (
    domain_initial,
    initial_form_datum,
    initial_sharp,
    initial_velocity,
    lift_to_rung,
    prepare_energy_data,
    prepare_wave_data,
)
from .nls import nls_solve, nonlinear_term
from .nonlinearity import Nonlinearity
from .trace import EvolutionTrace
from .wave import wave_solve

logger = logging.getLogger(__name__)


def rung_data(
    reference: OperatorBundle,
    bundle: OperatorBundle,
    mode: ConvergenceMode,
    eps: float,
    seed: int,
    data: DataSection,
) -> tuple[FourierField, Optional[FourierField]]:
    """Initial data of one rung in the given mode: (u0_eps, u1_eps or None)."""
    spec = reference.spec
    mode = ConvergenceMode(mode)
    if mode is ConvergenceMode.NLS_ENERGY:
        u0 = initial_form_datum(spec, seed, data.amplitude)
        return prepare_energy_data(reference, bundle, u0, eps), None
    u0 = domain_initial(reference, initial_sharp(spec, seed, data.amplitude))
    if mode is ConvergenceMode.WAVE:
        u1 = initial_velocity(spec, seed, data.velocity_amplitude)
        return prepare_wave_data(reference, bundle, u0, u1)
    return lift_to_rung(reference, bundle, u0), None


def solve_rung(
    bundle: OperatorBundle,
    u0: FourierField,
    u1: Optional[FourierField],
    config: EvolutionConfig,
) -> EvolutionTrace:
    """Run one rung with snapshots kept at every recorded time."""
    run = config.model_copy(update={"keep_snapshots": True})
    if u1 is not None:
        return wave_solve(bundle, u0, u1, run)
    return nls_solve(bundle, u0, run)


def _nls_velocity(bundle: OperatorBundle, nl: Nonlinearity, u: FourierField) -> FourierField:
    # d_t u = -i (H u - g(u))
    return (bundle.apply_H(u) - nonlinear_term(nl, u)) * (-1j)


def phi_metric(
    coarse: OperatorBundle,
    fine: OperatorBundle,
    u: FourierField,
    u_fine: FourierField,
    nl: Nonlinearity,
    v: Optional[FourierField] = None,
    v_fine: Optional[FourierField] = None,
) -> float:
    """Distance of two rung states; wave states pass their velocities."""
    value = l2_norm(u - u_fine)
    value += l2_norm(coarse.apply_H(u) - fine.apply_H(u_fine))
    if v is None or v_fine is None:
        value += l2_norm(_nls_velocity(coarse, nl, u) - _nls_velocity(fine, nl, u_fine))
        return value
    value += l2_norm(v - v_fine)
    value += l2_norm(neg_h_power(coarse, v, 0.5) - neg_h_power(fine, v_fine, 0.5))
    return value


def _state(trace: EvolutionTrace, i: int) -> tuple[FourierField, Optional[FourierField]]:
    velocity = trace.velocities[i] if trace.velocities else None
    return trace.snapshots[i], velocity


def fill_phi_series(
    bundles: Sequence[OperatorBundle], traces: Sequence[EvolutionTrace], nl: Nonlinearity
) -> None:
    """phi of every rung against the next finer one at each recorded time."""
    for i in range(len(traces) - 1):
        coarse, fine = traces[i], traces[i + 1]
        coarse.phi_eps = []
        for j in range(len(coarse.times)):
            u, v = _state(coarse, j)
            u_fine, v_fine = _state(fine, j)
            phi = phi_metric(bundles[i], bundles[i + 1], u, u_fine, nl, v, v_fine)
            coarse.phi_eps.append(phi)


def phi_table(
    bundles: Sequence[OperatorBundle],
    traces: Sequence[EvolutionTrace],
    eps_list: Sequence[float],
    times: Sequence[float],
    mode: ConvergenceMode,
    nl: Nonlinearity,
    allowed_inversions: int = 0,
) -> PhiTable:
    """phi between consecutive rungs at the given times and the per-time trend."""
    rows: list[PhiRow] = []
    inversions: dict[float, int] = {}
    for t in times:
        column = []
        for i in range(len(traces) - 1):
            coarse, fine = traces[i], traces[i + 1]
            j, j_fine = coarse.index_at(t), fine.index_at(t)
            u, v = _state(coarse, j)
            u_fine, v_fine = _state(fine, j_fine)
            phi = phi_metric(bundles[i], bundles[i + 1], u, u_fine, nl, v, v_fine)
            column.append(phi)
            rows.append(
                PhiRow(t=coarse.times[j], eps_coarse=eps_list[i], eps_fine=eps_list[i + 1], phi=phi)
            )
        inversions[t] = count_inversions(column)
    decreasing = all(n <= allowed_inversions for n in inversions.values())
    table = PhiTable(
        mode=ConvergenceMode(mode).value, rows=rows, inversions=inversions, decreasing=decreasing
    )
    if not decreasing:
        logger.warning(f"phi_eps is not decreasing along the ladder: inversions {inversions}")
    return table


def convergence_experiment(
    bundles: Sequence[OperatorBundle],
    eps_list: Sequence[float],
    config: EvolutionConfig,
    mode: ConvergenceMode,
    times: Sequence[float],
    seed: int,
    data: Optional[DataSection] = None,
    allowed_inversions: int = 0,
) -> tuple[PhiTable, list[EvolutionTrace]]:
    """Solve every rung from its prepared data and tabulate phi.

    Bundles are ordered coarse to fine and must share the noise realization and the shift.
    The wave mode goes with a wave equation, the NLS modes with a Schroedinger one.

    Raises:
        ValueError: If mode and equation disagree
    """
    data = DataSection() if data is None else data
    mode = ConvergenceMode(mode)
    if (mode is ConvergenceMode.WAVE) != config.is_wave:
        raise ValueError(
            f"Convergence mode {mode.value} does not match equation {config.equation.value}"
        )
    reference = bundles[-1]
    traces = []
    for bundle, eps in zip(bundles, eps_list):
        u0, u1 = rung_data(reference, bundle, mode, eps, seed, data)
        traces.append(solve_rung(bundle, u0, u1, config))
    nl = Nonlinearity.from_config(config)
    fill_phi_series(bundles, traces, nl)
    table = phi_table(bundles, traces, eps_list, times, mode, nl, allowed_inversions)
    return table, traces
