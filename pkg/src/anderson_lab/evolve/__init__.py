"""Time evolution under the renormalized Hamiltonians."""

from .checks import (
    energy_apriori_check,
    fit_order,
    nls_domain_apriori_check,
    order_test,
    phase_shift_defect,
    scheme_cross_validation,
    tilde_growth_check,
)
from .convergence import convergence_experiment, phi_metric, phi_table
from .data import (
    DomainData,
    domain_initial,
    initial_form_datum,
    initial_sharp,
    initial_velocity,
    prepare_domain_data,
    prepare_energy_data,
    prepare_wave_data,
)
from .gronwall import gronwall_report, integrate_log_ode, log_gronwall_bound
from .nls import mass, nls_energy, nls_solve
from .nonlinearity import Nonlinearity
from .propagators import EigenBasis, propagate_linear, wave_propagate_linear
from .trace import TRACE_COLUMNS, EvolutionTrace
from .wave import tilde_energy, tilde_identity_residual, wave_energy, wave_solve

__all__ = [
    # Propagators and solvers
    "EigenBasis",
    "EvolutionTrace",
    "Nonlinearity",
    "TRACE_COLUMNS",
    "mass",
    "nls_energy",
    "nls_solve",
    "propagate_linear",
    "tilde_energy",
    "tilde_identity_residual",
    "wave_energy",
    "wave_propagate_linear",
    "wave_solve",
    # Data
    "DomainData",
    "domain_initial",
    "initial_form_datum",
    "initial_sharp",
    "initial_velocity",
    "prepare_domain_data",
    "prepare_energy_data",
    "prepare_wave_data",
    # Checks
    "convergence_experiment",
    "energy_apriori_check",
    "fit_order",
    "gronwall_report",
    "integrate_log_ode",
    "log_gronwall_bound",
    "nls_domain_apriori_check",
    "order_test",
    "phase_shift_defect",
    "phi_metric",
    "phi_table",
    "scheme_cross_validation",
    "tilde_growth_check",
]
