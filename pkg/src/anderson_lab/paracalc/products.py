"""Bony paraproducts and the resonant product.

With Delta_j the Littlewood-Paley blocks and S_{j-1} = sum_{i <= j-2} Delta_i:

    f < g = sum_j S_{j-1} f Delta_j g        (low-high)
    f o g = sum_{|i-j| <= 1} Delta_i f Delta_j g  (resonant)
    f > g = g < f                             (high-low)

Block products are accumulated on the alias-free quadratic grid and projected onto the
lattice once, so f < g + f o g + f > g equals the projected product f g to rounding.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from ..errors import SpecMismatchError
from ..spectral.dyadic import DyadicPartition
from ..spectral.lattice import (
    FourierField,
    coeffs_to_grid,
    product_grid_size,
)

Grid = NDArray[Any]


@dataclass(frozen=True)
class ProductTriple:
    """The three Bony pieces of a product f g."""

    lo_hi: FourierField
    resonant: FourierField
    hi_lo: FourierField

    @property
    def total(self) -> FourierField:
        return self.lo_hi + self.resonant + self.hi_lo


def resolve_partition(f: FourierField, part: Optional[DyadicPartition]) -> DyadicPartition:
    part = DyadicPartition.for_spec(f.spec) if part is None else part
    if part.spec != f.spec:
        raise SpecMismatchError("Dyadic partition and field live on different lattices")
    return part


def block_grids(f: FourierField, part: Optional[DyadicPartition] = None) -> list[Grid]:
    """Grids of Delta_{-1} f, ..., Delta_{j_max} f on the quadratic product grid (memoized)."""
    part = resolve_partition(f, part)
    n = product_grid_size(f.spec, 2)

    def build() -> list[Grid]:
        grids = []
        for j in part.blocks:
            values = coeffs_to_grid(f.spec, f.coeffs * part.multiplier(j), n)
            grids.append(values.real if f.reality else values)
        return grids

    grids: list[Grid] = f.cached_grid(("blocks", n), build)
    return grids


def _lo_hi_grid(F: Sequence[Grid], G: Sequence[Grid]) -> Grid:
    out: Grid = np.zeros_like(G[0] * F[0])
    acc: Grid = np.zeros_like(F[0])
    for p in range(2, len(G)):
        acc = acc + F[p - 2]
        out = out + acc * G[p]
    return out


def _resonant_grid(F: Sequence[Grid], G: Sequence[Grid]) -> Grid:
    out: Grid = np.zeros_like(G[0] * F[0])
    last = len(G) - 1
    for p in range(len(F)):
        near = G[p]
        if p > 0:
            near = near + G[p - 1]
        if p < last:
            near = near + G[p + 1]
        out = out + F[p] * near
    return out


def _project(f: FourierField, g: FourierField, values: Grid) -> FourierField:
    return FourierField.from_grid(f.spec, values, f.reality and g.reality)


def lo_hi(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """Paraproduct f < g."""
    f.check_same(g)
    return _project(f, g, _lo_hi_grid(block_grids(f, part), block_grids(g, part)))


def hi_lo(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """Paraproduct f > g = g < f."""
    return lo_hi(g, f, part)


def resonant(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """Resonant product f o g."""
    f.check_same(g)
    return _project(f, g, _resonant_grid(block_grids(f, part), block_grids(g, part)))


def hi_res(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """f > g + f o g."""
    f.check_same(g)
    F, G = block_grids(f, part), block_grids(g, part)
    return _project(f, g, _lo_hi_grid(G, F) + _resonant_grid(F, G))


def paraproduct(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> ProductTriple:
    """Bony decomposition of f g.

    Raises:
        SpecMismatchError: If f and g live on different lattices
    """
    f.check_same(g)
    F, G = block_grids(f, part), block_grids(g, part)
    return ProductTriple(
        lo_hi=_project(f, g, _lo_hi_grid(F, G)),
        resonant=_project(f, g, _resonant_grid(F, G)),
        hi_lo=_project(f, g, _lo_hi_grid(G, F)),
    )


def _vector_pairs(
    fs: Sequence[FourierField], gs: Sequence[FourierField]
) -> list[tuple[FourierField, FourierField]]:
    if len(fs) != len(gs) or not fs:
        raise SpecMismatchError(f"Vector fields of lengths {len(fs)} and {len(gs)}")
    for f, g in zip(fs, gs):
        f.check_same(g)
    return list(zip(fs, gs))


def vec_lo_hi(
    fs: Sequence[FourierField],
    gs: Sequence[FourierField],
    part: Optional[DyadicPartition] = None,
) -> FourierField:
    """sum_a f_a < g_a."""
    pairs = _vector_pairs(fs, gs)
    values = sum(_lo_hi_grid(block_grids(f, part), block_grids(g, part)) for f, g in pairs)
    real = all(f.reality and g.reality for f, g in pairs)
    return FourierField.from_grid(fs[0].spec, np.asarray(values), real)


def vec_resonant(
    fs: Sequence[FourierField],
    gs: Sequence[FourierField],
    part: Optional[DyadicPartition] = None,
) -> FourierField:
    """sum_a f_a o g_a."""
    pairs = _vector_pairs(fs, gs)
    values = sum(_resonant_grid(block_grids(f, part), block_grids(g, part)) for f, g in pairs)
    real = all(f.reality and g.reality for f, g in pairs)
    return FourierField.from_grid(fs[0].spec, np.asarray(values), real)
