"""Littlewood-Paley decomposition on the Fourier lattice.

The low-frequency bump chi is psi(|xi|) and the annulus bump rho is
psi(|xi|/2) - psi(|xi|), where psi is a smooth radial cutoff equal to 1 on
|xi| <= 3/4 and to 0 on |xi| >= 4/3. Then chi is supported in the ball of radius
4/3, rho in the annulus 3/4 <= |xi| <= 8/3, and chi + sum_j rho(2^-j .) telescopes
to psi(2^-(J+1) |xi|), which is exactly 1 on the lattice once J reaches j_max.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..errors import DomainViolationError, SpecMismatchError
from ..models.torus import TorusSpec
from .lattice import FourierField, RealArray, k_norm, k_squared

CHI_RADIUS = 4.0 / 3.0
RHO_INNER = 3.0 / 4.0
RHO_OUTER = 8.0 / 3.0


def _bump_tail(t: NDArray[Any]) -> RealArray:
    out = np.zeros_like(t, dtype=np.float64)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t: NDArray[Any]) -> RealArray:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=np.float64)
    a = _bump_tail(t)
    b = _bump_tail(1.0 - t)
    return a / (a + b)


def psi(r: NDArray[Any]) -> RealArray:
    """Radial cutoff: 1 on r <= 3/4, 0 on r >= 4/3."""
    r = np.asarray(r, dtype=np.float64)
    return 1.0 - smooth_step((r - RHO_INNER) / (CHI_RADIUS - RHO_INNER))


def chi(r: NDArray[Any]) -> RealArray:
    return psi(r)


def rho(r: NDArray[Any]) -> RealArray:
    r = np.asarray(r, dtype=np.float64)
    return psi(r / 2.0) - psi(r)


class Side(str, Enum):
    """Which side of the sharp cutoff |k| = 2^N to keep."""

    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """Block multipliers chi(k), rho(2^-j k) on one lattice.

    Attributes:
        spec: Lattice the multipliers are tabulated on
        j_max: Last block that meets the lattice
        multipliers: Array of shape (j_max + 2, *spec.shape); row j + 1 is block j
    """

    spec: TorusSpec
    j_max: int
    multipliers: RealArray

    @classmethod
    def for_spec(cls, spec: TorusSpec) -> "DyadicPartition":
        return _partition(spec)

    @property
    def blocks(self) -> range:
        """Block indices -1, 0, ..., j_max."""
        return range(-1, self.j_max + 1)

    def multiplier(self, j: int) -> RealArray:
        """chi on the lattice for j = -1, rho(2^-j .) for j >= 0, zero past j_max."""
        if j < -1:
            raise DomainViolationError(f"Block index must be >= -1, got {j}")
        if j > self.j_max:
            return np.zeros(self.spec.shape)
        return self.multipliers[j + 1]

    def low(self, j: int) -> RealArray:
        """Multiplier of S_j = sum of blocks i <= j - 1."""
        if j <= -1:
            return np.zeros(self.spec.shape)
        top = min(j + 1, self.j_max + 2)
        return np.asarray(self.multipliers[:top].sum(axis=0))

    def support_radius(self, j: int) -> tuple[float, float]:
        """Closed radial support [inner, outer] of block j."""
        if j == -1:
            return 0.0, CHI_RADIUS
        return RHO_INNER * 2.0**j, RHO_OUTER * 2.0**j


def _j_max(spec: TorusSpec) -> int:
    j = 0
    while RHO_INNER * 2.0 ** (j + 1) < spec.max_radius:
        j += 1
    return j


@lru_cache(maxsize=32)
def _partition(spec: TorusSpec) -> DyadicPartition:
    j_max = _j_max(spec)
    r = k_norm(spec)
    rows = [chi(r)] + [rho(r / 2.0**j) for j in range(j_max + 1)]
    multipliers = np.stack(rows)
    multipliers.setflags(write=False)
    return DyadicPartition(spec=spec, j_max=j_max, multipliers=multipliers)


def lp_block(f: FourierField, j: int, part: DyadicPartition) -> FourierField:
    """Littlewood-Paley block Delta_j f (zero past j_max)."""
    _check_partition(f, part)
    return f.multiply(part.multiplier(j))


def low_pass(f: FourierField, j: int, part: DyadicPartition) -> FourierField:
    """S_j f = sum_{i <= j-1} Delta_i f."""
    _check_partition(f, part)
    return f.multiply(part.low(j))


def freq_cutoff(f: FourierField, N: int, side: Side = Side.ABOVE) -> FourierField:
    """Sharp euclidean cutoff: Delta_{>N} f (above) or Delta_{<=N} f (below)."""
    if N < 0:
        raise DomainViolationError(f"Cutoff level must be >= 0, got {N}")
    high = k_squared(f.spec) > 4**N
    mask = high if Side(side) is Side.ABOVE else ~high
    return f.multiply(mask.astype(np.float64))


def high(f: FourierField, N: int) -> FourierField:
    return freq_cutoff(f, N, Side.ABOVE)


def low(f: FourierField, N: int) -> FourierField:
    return freq_cutoff(f, N, Side.BELOW)


def max_cutoff_level(spec: TorusSpec) -> int:
    """Largest N with 2^N <= K sqrt(d); beyond it Delta_{>N} vanishes on the lattice."""
    return int(math.floor(math.log2(spec.max_radius)))


def _check_partition(f: FourierField, part: DyadicPartition) -> None:
    if f.spec != part.spec:
        raise SpecMismatchError(
            f"Partition built for {part.spec!r} applied to a field on {f.spec!r}"
        )
