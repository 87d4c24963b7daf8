"""Gauge-invariant nonlinearities g(u) = sign * N(|u|^2) u.

NLS:  i d_t u = H u - g(u),      E(u) = -1/2 <u, H u> + sign/2 int Phi(|u|^2)
wave: d_t^2 u = H u - g(u),      E(u) = 1/2 ||d_t u||^2 - 1/2 <u, H u> + sign/2 int Phi(u^2)

with Phi' = N. Cubic: N(r) = r, so g(u) = |u|^2 u and the potential term is 1/4 int |u|^4.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..models.evolution import EvolutionConfig, NonlinearityKind

Array = NDArray[Any]


@dataclass(frozen=True)
class Nonlinearity:
    """Modulus profile N with its derivatives and primitive."""

    kind: NonlinearityKind
    power: float = 3.0
    taper_scale: float = 4.0

    @classmethod
    def from_config(cls, config: EvolutionConfig) -> "Nonlinearity":
        kind = NonlinearityKind.NONE if config.is_linear else config.nonlinearity
        return cls(kind, config.power, config.taper_scale)

    @property
    def sign(self) -> float:
        """+1 defocusing, -1 focusing."""
        return -1.0 if self.kind is NonlinearityKind.CUBIC_FOCUSING else 1.0

    @property
    def is_zero(self) -> bool:
        return self.kind is NonlinearityKind.NONE

    @property
    def _q(self) -> float:
        return (self.power - 1.0) / 2.0

    def N(self, r: Array) -> Array:
        r = np.asarray(r, dtype=np.float64)
        if self.kind is NonlinearityKind.NONE:
            return np.zeros_like(r)
        if self.kind is NonlinearityKind.POWER:
            return np.power(r, self._q)
        if self.kind is NonlinearityKind.BOUNDED:
            L = self.taper_scale
            return L * np.tanh(r / L)
        return r

    def dN(self, r: Array) -> Array:
        r = np.asarray(r, dtype=np.float64)
        if self.kind is NonlinearityKind.NONE:
            return np.zeros_like(r)
        if self.kind is NonlinearityKind.POWER:
            q = self._q
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(r > 0, q * np.power(r, q - 1.0), 0.0)
        if self.kind is NonlinearityKind.BOUNDED:
            return 1.0 / np.cosh(r / self.taper_scale) ** 2
        return np.ones_like(r)

    def d2N(self, r: Array) -> Array:
        r = np.asarray(r, dtype=np.float64)
        if self.kind is NonlinearityKind.POWER:
            q = self._q
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(r > 0, q * (q - 1.0) * np.power(r, q - 2.0), 0.0)
        if self.kind is NonlinearityKind.BOUNDED:
            L = self.taper_scale
            return -2.0 / L * np.tanh(r / L) / np.cosh(r / L) ** 2
        return np.zeros_like(r)

    def Phi(self, r: Array) -> Array:
        """Primitive of N with Phi(0) = 0."""
        r = np.asarray(r, dtype=np.float64)
        if self.kind is NonlinearityKind.NONE:
            return np.zeros_like(r)
        if self.kind is NonlinearityKind.POWER:
            return np.power(r, self._q + 1.0) / (self._q + 1.0)
        if self.kind is NonlinearityKind.BOUNDED:
            L = self.taper_scale
            # log cosh(x) = x + log1p(e^{-2x}) - log 2, stable for large x
            x = r / L
            return L * L * (x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0))
        return 0.5 * r * r

    def g(self, u: Array) -> Array:
        """sign N(|u|^2) u."""
        return self.sign * self.N(np.abs(u) ** 2) * u

    def phase(self, u: Array) -> Array:
        """sign N(|u|^2), the rate of the exact nonlinear NLS phase."""
        return self.sign * self.N(np.abs(u) ** 2)

    def dg(self, u: Array) -> Array:
        """g'(u) for real u: sign (N(u^2) + 2 u^2 N'(u^2))."""
        r = u * u
        return self.sign * (self.N(r) + 2.0 * r * self.dN(r))

    def d2g(self, u: Array) -> Array:
        """g''(u) for real u: sign (6 u N'(u^2) + 4 u^3 N''(u^2))."""
        r = u * u
        return self.sign * (6.0 * u * self.dN(r) + 4.0 * u * r * self.d2N(r))
