"""Renormalized Anderson Hamiltonians in 2-d and 3-d."""

from .anderson2d import (
    OperatorBundle2D,
    ParacontrolledPair,
    agreement_defect,
    apply_A,
    assemble_matrix_eps,
    b_xi,
    choose_N,
    domain_samples,
    g_deviation,
    gamma_inverse,
    gamma_map,
    lower_bound_check,
    pair_from_u,
    shift_and_bundle,
)
from .anderson3d import (
    FlatSharpTriple,
    OperatorBundle3D,
    apply_A_3d,
    assemble_matrix_eps_3d,
    b_xi_3d,
    choose_N_3d,
    conjugation_defect,
    direct_defect,
    domain_samples_3d,
    g_deviation_3d,
    gamma_inverse_3d,
    gamma_map_3d,
    h1_flat_bound_check,
    shift_and_bundle_3d,
    triple_from_flat,
    z_product_check,
)
from .bundle import OperatorBundle, energy_norm, h_norm, neg_h_power, resolvent_apply
from .diagnostics import (
    agmon_ratio,
    functional_ineq_report,
    ladder_table,
    resolvent_ladder,
)
from .matrix import OperatorMatrix, SolveRoute

__all__ = [
    # Shared
    "OperatorBundle",
    "OperatorMatrix",
    "SolveRoute",
    "energy_norm",
    "h_norm",
    "neg_h_power",
    "resolvent_apply",
    # 2-d
    "OperatorBundle2D",
    "ParacontrolledPair",
    "agreement_defect",
    "apply_A",
    "assemble_matrix_eps",
    "b_xi",
    "choose_N",
    "domain_samples",
    "g_deviation",
    "gamma_inverse",
    "gamma_map",
    "lower_bound_check",
    "pair_from_u",
    "shift_and_bundle",
    # 3-d
    "FlatSharpTriple",
    "OperatorBundle3D",
    "apply_A_3d",
    "assemble_matrix_eps_3d",
    "b_xi_3d",
    "choose_N_3d",
    "conjugation_defect",
    "direct_defect",
    "domain_samples_3d",
    "g_deviation_3d",
    "gamma_inverse_3d",
    "gamma_map_3d",
    "h1_flat_bound_check",
    "shift_and_bundle_3d",
    "triple_from_flat",
    "z_product_check",
    # Diagnostics
    "agmon_ratio",
    "functional_ineq_report",
    "ladder_table",
    "resolvent_ladder",
]
