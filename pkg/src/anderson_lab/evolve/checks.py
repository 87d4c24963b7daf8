"""Trajectory checks: a-priori bounds, order of accuracy, scheme and gauge consistency."""

import logging
import math
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from ..errors import NumericalError
from ..models.evolution import AprioriReport, EvolutionConfig, OrderFit, Scheme
from ..operators.bundle import OperatorBundle, energy_norm
from ..spectral.lattice import FourierField, l2_norm
from .nls import nls_solve
from .trace import EvolutionTrace
from .wave import tilde_identity_residual, wave_solve

logger = logging.getLogger(__name__)

# largest argument handed to exp before the envelope is declared infinite
EXP_LIMIT = 700.0


def _envelope(h_u0: float, energy: float, t: float, kappa: float) -> float:
    energy = max(energy, 0.0)
    h0 = max(math.e, 1.0 + h_u0)
    growth = energy * t
    if growth > EXP_LIMIT:
        return math.inf
    exponent = math.log(h0) * math.exp(growth)
    if exponent > EXP_LIMIT:
        return math.inf
    return h_u0 + kappa * energy**1.5 + math.exp(exponent) - h0


def nls_domain_apriori_check(
    trace: EvolutionTrace, bundle: OperatorBundle, u0: FourierField, kappa: float = 1.0
) -> AprioriReport:
    """||H u(t)|| against a double-exponential envelope in the energy.

    The envelope ||H u0|| + kappa E^{3/2} + exp(log(h0) e^{E t}) - h0 with
    h0 = max(e, 1 + ||H u0||) equals ||H u0|| + kappa E^{3/2} at t = 0 and keeps the
    shape of the domain estimate.
    """
    h_u0 = l2_norm(bundle.apply_H(u0))
    energy = trace.energy[0]
    ratios = [
        h / _envelope(h_u0, energy, t, kappa) if h > 0 else 0.0
        for t, h in zip(trace.times, trace.h_norm)
    ]
    worst = max(ratios) if ratios else 0.0
    report = AprioriReport(
        name="nls-domain",
        values={"max_ratio": worst, "h_u0": h_u0, "energy": energy, "kappa": kappa},
        passed=worst <= 1.0 + 1e-9,
    )
    if not report.passed:
        logger.warning(f"||H u(t)|| leaves its envelope: max ratio {worst:.4g}")
    return report


def holder_half_quotient(times: Sequence[float], snapshots: Sequence[FourierField]) -> float:
    """max ||u(t) - u(s)|| / |t - s|^{1/2} over pairs of snapshots."""
    best = 0.0
    for i in range(len(snapshots)):
        for j in range(i + 1, len(snapshots)):
            gap = abs(times[j] - times[i])
            if gap > 0:
                best = max(best, l2_norm(snapshots[j] - snapshots[i]) / math.sqrt(gap))
    return best


def energy_apriori_check(trace: EvolutionTrace, bundle: OperatorBundle) -> AprioriReport:
    """Sup-in-time mass and energy-norm ratios, and the Hoelder-1/2 quotient.

    Raises:
        NumericalError: If the trace kept fewer snapshots than recorded times
    """
    if len(trace.snapshots) != len(trace.times):
        raise NumericalError("Energy a-priori check needs a snapshot at every recorded time")
    mass0 = trace.mass[0]
    mass_ratio = max(m / mass0 for m in trace.mass) if mass0 > 0 else 0.0
    energy0 = trace.energy[0]
    form_norms = [energy_norm(bundle, u) for u in trace.snapshots]
    energy_ratio = max(form_norms) / math.sqrt(energy0) if energy0 > 0 else math.inf
    holder = holder_half_quotient(trace.times, trace.snapshots)
    values = {"mass_ratio": mass_ratio, "energy_ratio": energy_ratio, "holder_half": holder}
    return AprioriReport(
        name="energy", values=values, passed=all(math.isfinite(v) for v in values.values())
    )


def tilde_growth_check(trace: EvolutionTrace) -> AprioriReport:
    """Fitted exponential rate of the velocity energy and the integral identity residual."""
    tilde0 = trace.tilde_energy[0]
    rate = 0.0
    if tilde0 > 0:
        for t, value in zip(trace.times[1:], trace.tilde_energy[1:]):
            if t > 0 and value > 0:
                rate = max(rate, math.log(value / tilde0) / t)
    residual = tilde_identity_residual(trace)
    return AprioriReport(
        name="tilde-energy",
        values={"rate": rate, "identity_residual": residual},
        passed=tilde0 > 0 and math.isfinite(rate),
    )


def fit_order(dts: Sequence[float], drifts: Sequence[float]) -> OrderFit:
    """Least-squares slope of log drift against log dt.

    Raises:
        NumericalError: If fewer than two positive drifts are available
    """
    pairs = [(dt, d) for dt, d in zip(dts, drifts) if d > 0]
    if len(pairs) < 2:
        raise NumericalError("Order fit needs at least two positive drifts")
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    slope = float(np.polyfit(x, y, 1)[0])
    return OrderFit(dts=list(dts), drifts=list(drifts), slope=slope)


def order_test(
    bundle: OperatorBundle,
    u0: FourierField,
    config: EvolutionConfig,
    dts: Sequence[float],
    u1: Optional[FourierField] = None,
) -> OrderFit:
    """Energy drift |E(T) - E(0)| for each dt and its log-log slope."""
    if config.is_wave and u1 is None:
        raise ValueError("Wave order test needs an initial velocity")
    drifts = []
    for dt in dts:
        steps = max(1, round(config.T / dt))
        run = config.model_copy(update={"dt": dt, "record_every": steps})
        if u1 is not None and config.is_wave:
            trace = wave_solve(bundle, u0, u1, run)
        else:
            trace = nls_solve(bundle, u0, run)
        drifts.append(abs(trace.energy[-1] - trace.energy[0]))
        logger.info(f"dt={dt:.3g}: energy drift {drifts[-1]:.3e}")
    fit = fit_order(dts, drifts)
    logger.info(f"Energy drift order {fit.slope:.3f}")
    return fit


def scheme_cross_validation(
    bundle: OperatorBundle, u0: FourierField, config: EvolutionConfig
) -> float:
    """||u_strang(T) - u_duhamel(T)|| / ||u_strang(T)||."""
    strang = nls_solve(bundle, u0, config.model_copy(update={"scheme": Scheme.STRANG}))
    duhamel = nls_solve(bundle, u0, config.model_copy(update={"scheme": Scheme.DUHAMEL}))
    a, b = strang.snapshots[-1], duhamel.snapshots[-1]
    return l2_norm(a - b) / max(l2_norm(a), 1e-300)


def phase_shift_defect(
    bundle: OperatorBundle, u0: FourierField, config: EvolutionConfig, c: float
) -> float:
    """Solve with K_Xi + c and undo the gauge: ||e^{-icT} v(T) - u(T)|| / ||u(T)||."""
    u_T = nls_solve(bundle, u0, config).snapshots[-1]
    shifted = replace(bundle, K_Xi=bundle.K_Xi + c)
    v_T = nls_solve(shifted, u0, config).snapshots[-1]
    T = config.n_steps * config.dt
    back = v_T * complex(np.exp(-1j * c * T))
    return l2_norm(back - u_T) / max(l2_norm(u_T), 1e-300)
