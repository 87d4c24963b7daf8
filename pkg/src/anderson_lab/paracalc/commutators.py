"""Commutators and remainders built from the Bony primitives."""

from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from ..errors import DomainViolationError
from ..spectral.dyadic import DyadicPartition, high, low
from ..spectral.lattice import FourierField, apply_pointwise, inner, product
from .products import lo_hi, resolve_partition, resonant

# Blocks j, k with |j - k| > DEFECT_WINDOW never interact in <Delta_i f, Delta_j h Delta_k g>
# when i <= k - 2 (supports 4/3 and [3/4, 8/3] of chi and rho).
DEFECT_WINDOW = 4

PointwiseFn = Callable[[NDArray[np.float64]], NDArray[np.float64]]


def commutator_C(
    f: FourierField, g: FourierField, h: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """C(f, g, h) = (f < g) o h - f (g o h)."""
    return resonant(lo_hi(f, g, part), h, part) - product(f, resonant(g, h, part))


def commutator_CN(
    f: FourierField,
    g: FourierField,
    h: FourierField,
    N: int,
    part: Optional[DyadicPartition] = None,
) -> FourierField:
    """C_N(f, g, h) = (Delta_{>N}(f < g)) o h - f (g o h)."""
    return resonant(high(lo_hi(f, g, part), N), h, part) - product(f, resonant(g, h, part))


def commutator_difference(
    f: FourierField,
    g: FourierField,
    h: FourierField,
    N: int,
    part: Optional[DyadicPartition] = None,
) -> FourierField:
    """C - C_N = (Delta_{<=N}(f < g)) o h."""
    return resonant(low(lo_hi(f, g, part), N), h, part)


def adjoint_defect_D(
    f: FourierField, g: FourierField, h: FourierField, part: Optional[DyadicPartition] = None
) -> complex:
    """D(f, g, h) = <f, h o g> - <f < g, h>."""
    return inner(f, resonant(h, g, part)) - inner(lo_hi(f, g, part), h)


def adjoint_defect_blocks(
    f: FourierField,
    g: FourierField,
    h: FourierField,
    part: Optional[DyadicPartition] = None,
    window: int = DEFECT_WINDOW,
) -> complex:
    """Block-sum evaluation of D for real g.

    D = sum_{i >= k-1, |j-k| <= L} T(i,j,k) - sum_{all i, 1 < |j-k| <= L} T(i,j,k),
    T(i,j,k) = <Delta_i f, Delta_j h Delta_k g>, L = window.
    """
    part = resolve_partition(f, part)
    if not g.reality:
        raise DomainViolationError("The block-sum form of D needs a real g")
    blocks = list(part.blocks)
    f_blocks = {i: f.multiply(part.multiplier(i)) for i in blocks}
    h_blocks = {j: h.multiply(part.multiplier(j)) for j in blocks}
    g_blocks = {k: g.multiply(part.multiplier(k)) for k in blocks}
    total = 0j
    for k in blocks:
        f_upper = FourierField.zeros(f.spec, reality=False)
        for i in blocks:
            if i >= k - 1:
                f_upper = f_upper + f_blocks[i]
        for j in blocks:
            gap = abs(j - k)
            if gap > window:
                continue
            hg = product(h_blocks[j], g_blocks[k])
            total += inner(f_upper, hg)
            if gap > 1:
                total -= inner(f, hg)
    return total


def para_resolvent_R(
    f: FourierField, g: FourierField, part: Optional[DyadicPartition] = None
) -> FourierField:
    """R(f, g) = (1-Lap)^{-1}(f < g) - f < (1-Lap)^{-1} g."""
    return lo_hi(f, g, part).bessel_inv() - lo_hi(f, g.bessel_inv(), part)


def paralinearize(
    F: PointwiseFn,
    dF: PointwiseFn,
    f: FourierField,
    part: Optional[DyadicPartition] = None,
) -> tuple[FourierField, FourierField]:
    """Split F(f) = F'(f) < f + R_F(f).

    Args:
        F: Pointwise function, evaluated on grid samples of f
        dF: Its derivative
        f: Real field
        part: Dyadic partition on f's lattice

    Returns:
        (para_part, remainder)

    Raises:
        DomainViolationError: If F' is not finite at the attained values
    """
    derivative = apply_pointwise(dF, f)
    if not np.all(np.isfinite(derivative.coeffs)):
        raise DomainViolationError("F' is not finite at the values attained by f")
    para_part = lo_hi(derivative, f, part)
    remainder = apply_pointwise(F, f) - para_part
    return para_part, remainder
