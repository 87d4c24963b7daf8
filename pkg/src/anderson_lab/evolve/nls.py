"""Nonlinear Schroedinger flow i d_t u = H_eps u - g(u).

Nonlinear terms are evaluated on the grid of `nonlinear_grid`, on which the cubic term
|u|^2 u and the quartic potential are alias free on the lattice. The Strang phase step is
the one exception: it runs on the (2K+1)^d collocation grid, where sampling and projection
are inverse to each other, so the exact phase step is unitary and the mass is conserved to
rounding. Strang trajectories therefore conserve the collocation-grid energy, and their
trace records that energy.
"""

import logging
from typing import Callable, Optional

import numpy as np

from ..errors import BlowUpError, ConvergenceError, DomainViolationError, OverflowFieldError
from ..models.evolution import EvolutionConfig, NonlinearityKind, Scheme
from ..models.torus import TorusSpec
from ..operators.bundle import OperatorBundle
from ..spectral.lattice import FourierField, l2_norm, product_grid_size
from .nonlinearity import Nonlinearity
from .propagators import EigenBasis
from .trace import EvolutionTrace

logger = logging.getLogger(__name__)

# cubic terms and the quartic potential; power nonlinearities keep this grid
NONLINEAR_ORDER = 3


def nonlinear_grid(spec: TorusSpec) -> int:
    """Grid on which g(u) and Phi(|u|^2) are evaluated."""
    return product_grid_size(spec, NONLINEAR_ORDER)


def mass(u: FourierField) -> float:
    """||u||_{L^2}^2."""
    return l2_norm(u) ** 2


def h_quadratic(bundle: OperatorBundle, u: FourierField) -> float:
    """<u, H_eps u>."""
    return bundle.matrix_eps.quadratic_form(u) - bundle.K_Xi * mass(u)


def potential(nl: Nonlinearity, u: FourierField, n: Optional[int] = None) -> float:
    """sign/2 int Phi(|u|^2) as a grid mean, on the nonlinear grid unless n is given."""
    if nl.is_zero:
        return 0.0
    values = u.grid(nonlinear_grid(u.spec) if n is None else n)
    return 0.5 * nl.sign * float(np.mean(nl.Phi(np.abs(values) ** 2)))


def nls_energy(
    bundle: OperatorBundle, u: FourierField, nl: Nonlinearity, n: Optional[int] = None
) -> float:
    """E(u) = -1/2 <u, H u> + sign/2 int Phi(|u|^2)."""
    return -0.5 * h_quadratic(bundle, u) + potential(nl, u, n)


def nonlinear_term(nl: Nonlinearity, u: FourierField) -> FourierField:
    """Projection of g(u) from the nonlinear grid."""
    values = u.grid(nonlinear_grid(u.spec))
    return FourierField.from_grid(u.spec, nl.g(values), reality=False)


def _phase_step(nl: Nonlinearity, u: FourierField, tau: float) -> FourierField:
    values = u.grid(u.spec.side)
    return FourierField.from_grid(u.spec, values * np.exp(1j * tau * nl.phase(values)), False)


def _guard(u: FourierField, t: float, config: EvolutionConfig) -> float:
    sup = float(np.max(np.abs(u.grid(u.spec.side))))
    if not np.isfinite(sup):
        raise OverflowFieldError(f"Non-finite solution at t={t:.6g}")
    if sup > config.blowup_linf:
        raise BlowUpError(f"||u||_inf = {sup:.3e} exceeds {config.blowup_linf:g}", t, sup)
    return sup


def _record(
    trace: EvolutionTrace,
    bundle: OperatorBundle,
    nl: Nonlinearity,
    u: FourierField,
    t: float,
    sup: float,
    keep: bool,
    energy_grid: int,
) -> None:
    trace.times.append(t)
    trace.mass.append(mass(u))
    trace.energy.append(nls_energy(bundle, u, nl, energy_grid))
    trace.linf.append(sup)
    trace.h_norm.append(l2_norm(bundle.apply_H(u)))
    if keep:
        trace.snapshots.append(u)


def check_focusing(nl: Nonlinearity, u0: FourierField, config: EvolutionConfig) -> None:
    """Small-data guard of focusing runs.

    Raises:
        DomainViolationError: If the initial mass exceeds config.focusing_mass_limit
    """
    if nl.kind is NonlinearityKind.CUBIC_FOCUSING and mass(u0) > config.focusing_mass_limit:
        raise DomainViolationError(
            f"Focusing run needs small data: mass {mass(u0):.4g} > {config.focusing_mass_limit:g}"
        )


def _strang_stepper(
    basis: EigenBasis, nl: Nonlinearity, dt: float
) -> Callable[[FourierField], FourierField]:
    linear = np.exp(1j * dt * basis.w)

    def step(u: FourierField) -> FourierField:
        if not nl.is_zero:
            u = _phase_step(nl, u, 0.5 * dt)
        u = basis.from_eigen(linear * basis.to_eigen(u), u, reality=False)
        if not nl.is_zero:
            u = _phase_step(nl, u, 0.5 * dt)
        return u

    return step


def _duhamel_stepper(
    basis: EigenBasis, nl: Nonlinearity, config: EvolutionConfig
) -> Callable[[FourierField], FourierField]:
    dt = config.dt
    linear = np.exp(1j * dt * basis.w)

    def step(u: FourierField) -> FourierField:
        # u_{n+1} = e^{-i dt H}(u_n + i dt/2 g(u_n)) + i dt/2 g(u_{n+1})
        start = u + (0.5j * dt) * nonlinear_term(nl, u)
        base = basis.from_eigen(linear * basis.to_eigen(start), u, reality=False)
        if nl.is_zero:
            return base
        v = base
        for iteration in range(1, config.picard_max_iter + 1):
            v_next = base + (0.5j * dt) * nonlinear_term(nl, v)
            change = l2_norm(v_next - v)
            v = v_next
            if change <= config.picard_tol * max(l2_norm(v), 1e-300):
                return v
        raise ConvergenceError(
            f"Picard iteration of the mild formula did not converge in "
            f"{config.picard_max_iter} iterations; reduce dt",
            iterations=config.picard_max_iter,
            residual=change,
        )

    return step


def nls_solve(
    bundle: OperatorBundle,
    u0: FourierField,
    config: EvolutionConfig,
    nonlinearity: Optional[Nonlinearity] = None,
) -> EvolutionTrace:
    """Integrate i d_t u = H_eps u - g(u) on [0, T].

    Raises:
        DomainViolationError: Focusing run with large data
        ConvergenceError: Picard non-convergence in the Duhamel scheme
        BlowUpError: If ||u||_inf passes config.blowup_linf
        OverflowFieldError: On non-finite values
    """
    nl = Nonlinearity.from_config(config) if nonlinearity is None else nonlinearity
    check_focusing(nl, u0, config)
    basis = EigenBasis.of(bundle)
    if Scheme(config.scheme) is Scheme.STRANG:
        step = _strang_stepper(basis, nl, config.dt)
        energy_grid = u0.spec.side
    else:
        step = _duhamel_stepper(basis, nl, config)
        energy_grid = nonlinear_grid(u0.spec)
    trace = EvolutionTrace()
    u = u0
    _record(trace, bundle, nl, u, 0.0, _guard(u, 0.0, config), True, energy_grid)
    n_steps = config.n_steps
    for n in range(1, n_steps + 1):
        u = step(u)
        t = n * config.dt
        sup = _guard(u, t, config)
        if n % config.record_every == 0 or n == n_steps:
            keep = config.keep_snapshots or n == n_steps
            _record(trace, bundle, nl, u, t, sup, keep, energy_grid)
    drift = abs(trace.mass[-1] - trace.mass[0]) / max(trace.mass[0], 1e-300)
    logger.info(
        f"NLS {config.scheme} {n_steps} steps: relative mass drift {drift:.3e}, "
        f"energy {trace.energy[0]:.6g} -> {trace.energy[-1]:.6g}"
    )
    return trace
