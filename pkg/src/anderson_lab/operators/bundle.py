"""Shifted operator bundles shared by the 2-d and 3-d Hamiltonians.

A bundle holds the regularized matrix A_eps, the cutoff level N of the paracontrolled
ansatz, the shift K_Xi that makes H = A - K_Xi negative definite, and the empirical
constant C_Xi of the form lower bound.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from ..errors import NumericalError
from ..models.operator import BundleRecord
from ..models.torus import TorusSpec
from ..spectral.lattice import FourierField, bessel_symbol, l2_norm
from .matrix import (
    OperatorMatrix,
    SolveRoute,
    resolvent_iterative,
    resolvent_matrix,
)

logger = logging.getLogger(__name__)

# u_sharp samples are drawn at the edge of H^{DOMAIN_REGULARITY}
DOMAIN_REGULARITY = 2.5


@dataclass(frozen=True, eq=False)
class OperatorBundle(ABC):
    """Regularized operator with its shift and calibration constants.

    Attributes:
        matrix_eps: Dense A_eps on the Fourier basis
        N: Cutoff level of the paracontrolled ansatz
        K_Xi: Shift, lambda_max(A_eps) + margin
        C_Xi: Empirical constant of the lower bound on the form
        margin: Spectral gap of -H below which nothing lies
        contraction: Measured norm of the ansatz map at level N
    """

    matrix_eps: OperatorMatrix
    N: int
    K_Xi: float
    C_Xi: float
    margin: float
    contraction: float

    @property
    def spec(self) -> TorusSpec:
        return self.matrix_eps.spec

    @property
    @abstractmethod
    def xi(self) -> FourierField:
        """Regularized noise of the rung."""

    @property
    @abstractmethod
    def renorm_constant(self) -> float:
        """Renormalization constant subtracted in A_eps."""

    def apply_H(self, f: FourierField) -> FourierField:
        """H_eps f = A_eps f - K_Xi f."""
        return self.matrix_eps.apply(f) - self.K_Xi * f

    def shifted_spectrum(self) -> NDArray[np.float64]:
        """Eigenvalues of -H_eps, ascending."""
        return np.sort(self.K_Xi - self.matrix_eps.eigenvalues)

    def record(self, dim: int, seed: int, eps: float) -> BundleRecord:
        return BundleRecord(
            dim=dim,
            K=self.spec.K,
            seed=seed,
            eps=eps if math.isfinite(eps) else 1.0,
            N=self.N,
            contraction=self.contraction,
            K_Xi=self.K_Xi,
            C_Xi=self.C_Xi,
            lambda_min=self.matrix_eps.lambda_min,
            lambda_max=self.matrix_eps.lambda_max,
            hermitian_defect=self.matrix_eps.hermitian_defect(),
        )


def grad_norm_sq(f: FourierField) -> float:
    """||grad f||_{L^2}^2."""
    return float(sum(l2_norm(g) ** 2 for g in f.grad()))


def h_norm(f: FourierField, s: float) -> float:
    """Sobolev norm with the (1 + 4 pi^2 |k|^2)^{s/2} weight of (1 - Lap)^{s/2}."""
    weight = bessel_symbol(f.spec) ** (s / 2.0)
    return float(np.linalg.norm(f.coeffs * weight))


def calibrate_constant(ratios: Sequence[float]) -> float:
    """Constant dominating the sampled ratios with a safety margin.

    sup + max(|sup|, sup - inf, 1): doubles a positive sup and keeps a margin of at least
    the sampled spread when the sup is negative.
    """
    if not ratios:
        raise NumericalError("Calibration needs at least one sample")
    top, bottom = max(ratios), min(ratios)
    return top + max(abs(top), top - bottom, 1.0)


def energy_norm(bundle: OperatorBundle, u: FourierField) -> float:
    """||u||_{D(sqrt(-H))} = sqrt(<u, -H_eps u>).

    Raises:
        NumericalError: If the quadratic form is negative (mis-calibrated shift)
    """
    form = bundle.K_Xi * l2_norm(u) ** 2 - bundle.matrix_eps.quadratic_form(u)
    scale = max(1.0, abs(bundle.K_Xi)) * l2_norm(u) ** 2
    if form < -1e-10 * scale:
        raise NumericalError(f"<u, -H u> = {form:.3e} < 0; the shift K_Xi is too small")
    return math.sqrt(max(form, 0.0))


def resolvent_apply(
    bundle: OperatorBundle,
    f: FourierField,
    via: SolveRoute = SolveRoute.MATRIX,
    x0: Optional[FourierField] = None,
) -> FourierField:
    """Solve -H_eps u = f, i.e. (K_Xi - A_eps) u = f.

    Raises:
        ConvergenceError: If the iterative route misses the residual tolerance
    """
    if SolveRoute(via) is SolveRoute.MATRIX:
        return resolvent_matrix(bundle.matrix_eps, bundle.K_Xi, f)
    return resolvent_iterative(bundle.xi, bundle.renorm_constant, bundle.K_Xi, f, x0)


def neg_h_power(bundle: OperatorBundle, f: FourierField, power: float) -> FourierField:
    """(-H_eps)^power f through the eigensystem."""
    return bundle.matrix_eps.spectral_apply(lambda lam: (bundle.K_Xi - lam) ** power, f)
