"""Paraproducts, resonant products and commutator estimates."""

from .commutators import (
    DEFECT_WINDOW,
    adjoint_defect_blocks,
    adjoint_defect_D,
    commutator_C,
    commutator_CN,
    commutator_difference,
    para_resolvent_R,
    paralinearize,
)
from .products import (
    ProductTriple,
    block_grids,
    hi_lo,
    hi_res,
    lo_hi,
    paraproduct,
    resonant,
    vec_lo_hi,
    vec_resonant,
)
from .sweeps import ESTIMATE_CASES, EstimateCase, ratio_sweep, resolution_comparison

__all__ = [
    # Products
    "ProductTriple",
    "paraproduct",
    "lo_hi",
    "hi_lo",
    "hi_res",
    "resonant",
    "vec_lo_hi",
    "vec_resonant",
    "block_grids",
    # Commutators
    "DEFECT_WINDOW",
    "commutator_C",
    "commutator_CN",
    "commutator_difference",
    "adjoint_defect_D",
    "adjoint_defect_blocks",
    "para_resolvent_R",
    "paralinearize",
    # Sweeps
    "ESTIMATE_CASES",
    "EstimateCase",
    "ratio_sweep",
    "resolution_comparison",
]
