"""White noise, mollification, renormalization constants and enhanced noise."""

from .enhance import (
    EnhancedNoise2D,
    EnhancedNoise3D,
    ExpLift,
    enhance_2d,
    enhance_2d_from_field,
    enhance_3d,
    enhance_3d_from_field,
    exp_lift,
    tree_norms,
)
from .mollifiers import BUMP, COSINE, MOLLIFIERS, Mollifier, get_mollifier
from .renorm import (
    DEFAULT_SYMBOL_SCALE,
    direct_lattice_sum,
    renorm_c1,
    renorm_c2,
    renorm_const_2d,
    renorm_const_3d,
    renorm_rates,
    shell_counts,
)
from .white import lattice_truncated, mollify, sample_white_noise

__all__ = [
    # Sampling
    "sample_white_noise",
    "mollify",
    "lattice_truncated",
    "Mollifier",
    "MOLLIFIERS",
    "BUMP",
    "COSINE",
    "get_mollifier",
    # Constants
    "DEFAULT_SYMBOL_SCALE",
    "direct_lattice_sum",
    "renorm_const_2d",
    "renorm_const_3d",
    "renorm_c1",
    "renorm_c2",
    "renorm_rates",
    "shell_counts",
    # Enhancement
    "EnhancedNoise2D",
    "EnhancedNoise3D",
    "ExpLift",
    "enhance_2d",
    "enhance_2d_from_field",
    "enhance_3d",
    "enhance_3d_from_field",
    "exp_lift",
    "tree_norms",
]
