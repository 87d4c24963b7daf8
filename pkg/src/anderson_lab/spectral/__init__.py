"""Fourier-lattice fields, Littlewood-Paley blocks and norms on the torus."""

from .dyadic import (
    DyadicPartition,
    Side,
    chi,
    freq_cutoff,
    high,
    low,
    low_pass,
    lp_block,
    max_cutoff_level,
    rho,
)
from .lattice import (
    FourierField,
    VectorField,
    apply_pointwise,
    bessel_symbol,
    dft_forward,
    dft_inverse,
    dot,
    grid_points,
    inner,
    k_norm,
    k_squared,
    l2_norm,
    laplacian_symbol,
    linf_norm,
    product,
    product_grid_size,
    wavevectors,
)
from .norms import (
    bernstein_check,
    besov_norm,
    block_supported,
    holder_norm,
    lp_norm,
    sobolev_norm,
)
from .sampling import band_limited_field, hermitian_gaussian, rough_field
from .snapshot import read_snapshot, write_snapshot

__all__ = [
    # Fields
    "FourierField",
    "VectorField",
    "dft_forward",
    "dft_inverse",
    "grid_points",
    "wavevectors",
    "k_norm",
    "k_squared",
    "laplacian_symbol",
    "bessel_symbol",
    # Products and functionals
    "product",
    "product_grid_size",
    "dot",
    "apply_pointwise",
    "inner",
    "l2_norm",
    "linf_norm",
    # Littlewood-Paley
    "DyadicPartition",
    "Side",
    "chi",
    "rho",
    "lp_block",
    "low_pass",
    "freq_cutoff",
    "high",
    "low",
    "max_cutoff_level",
    # Norms
    "lp_norm",
    "besov_norm",
    "holder_norm",
    "sobolev_norm",
    "block_supported",
    "bernstein_check",
    # Sampling and IO
    "hermitian_gaussian",
    "rough_field",
    "band_limited_field",
    "read_snapshot",
    "write_snapshot",
]
