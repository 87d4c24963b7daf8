"""Exact linear propagators of the shifted operator through its eigensystem.

With -H_eps = K_Xi - A_eps = V diag(w) V^H (w > 0):

    e^{-itH} u0              = V diag(e^{itw}) V^H u0
    cos(t sqrt(-H)) u0       = V diag(cos(t sqrt w)) V^H u0
    sin(t sqrt(-H))/sqrt(-H) = V diag(t sinc(t sqrt w)) V^H
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from ..operators.bundle import OperatorBundle
from ..spectral.lattice import FourierField

RealArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

# below this |x| sinc is evaluated from its Taylor series
SINC_SERIES = 1e-4


def sinc(x: NDArray[np.float64]) -> RealArray:
    """sin(x)/x with sinc(0) = 1."""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < SINC_SERIES
    safe = np.where(small, 1.0, x)
    x2 = x * x
    series = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return np.where(small, series, np.sin(safe) / safe)


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Eigen-coordinates of -H_eps for one bundle."""

    vectors: ComplexArray
    w: RealArray

    @classmethod
    def of(cls, bundle: OperatorBundle) -> "EigenBasis":
        values, vectors = bundle.matrix_eps.eigensystem
        return cls(vectors=vectors, w=bundle.K_Xi - values)

    @property
    def omega(self) -> RealArray:
        """Frequencies sqrt(w) of the wave propagator."""
        return np.sqrt(np.maximum(self.w, 0.0))

    def to_eigen(self, f: FourierField) -> ComplexArray:
        return self.vectors.conj().T @ f.vector

    def from_eigen(self, a: ComplexArray, template: FourierField, reality: bool) -> FourierField:
        return FourierField.from_vector(template.spec, self.vectors @ a, reality)

    def apply(
        self, fn: Callable[[RealArray], NDArray[np.generic]], f: FourierField, reality: bool
    ) -> FourierField:
        """fn(-H) f."""
        return self.from_eigen(fn(self.w) * self.to_eigen(f), f, reality)


def propagate_linear(bundle: OperatorBundle, u0: FourierField, t: float) -> FourierField:
    """e^{-itH_eps} u0."""
    basis = EigenBasis.of(bundle)
    return basis.apply(lambda w: np.exp(1j * t * w), u0, reality=False)


def wave_propagate_linear(
    bundle: OperatorBundle, u0: FourierField, u1: FourierField, t: float
) -> tuple[FourierField, FourierField]:
    """(u(t), d_t u(t)) of d_t^2 u = H_eps u with data (u0, u1)."""
    return wave_step(EigenBasis.of(bundle), u0, u1, t)


def wave_step(
    basis: EigenBasis, u0: FourierField, u1: FourierField, t: float
) -> tuple[FourierField, FourierField]:
    """Exact linear wave flow over time t in eigen-coordinates."""
    omega = basis.omega
    a0, a1 = basis.to_eigen(u0), basis.to_eigen(u1)
    cos = np.cos(omega * t)
    u = cos * a0 + t * sinc(omega * t) * a1
    du = -omega * np.sin(omega * t) * a0 + cos * a1
    reality = u0.reality and u1.reality
    return basis.from_eigen(u, u0, reality), basis.from_eigen(du, u0, reality)
