"""Dense Fourier-basis matrices of the regularized Hamiltonian and its resolvent.

A_eps = Lap + xi_eps - c acts on the coefficient vector (lexicographic k order) as

    (A_eps u)(k) = (-4 pi^2 |k|^2 - c) u(k) + sum_{k'} xi_eps(k - k') u(k'),

the sum running over the truncated lattice. The matrix-free route evaluates the same
convolution as an alias-free grid product, so both routes agree to rounding.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from numpy.typing import NDArray

from ..config import settings
from ..errors import ConvergenceError, ResolutionError
from ..models.torus import TorusSpec
from ..spectral.lattice import FourierField, l2_norm, laplacian_symbol, product

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]

RESIDUAL_TOL = 1e-10


class SolveRoute(str, Enum):
    """How resolvents are applied."""

    MATRIX = "matrix"
    ITERATIVE = "iterative"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Hermitian matrix on the Fourier basis with a lazily computed eigensystem."""

    spec: TorusSpec
    data: ComplexMatrix

    @cached_property
    def eigensystem(self) -> tuple[NDArray[np.float64], ComplexMatrix]:
        """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
        logger.debug(f"eigh on a {self.data.shape[0]}-row matrix")
        values, vectors = scipy.linalg.eigh(self.data)
        return values, vectors

    @property
    def eigenvalues(self) -> NDArray[np.float64]:
        return self.eigensystem[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.data))))

    def hermitian_defect(self) -> float:
        """max |M - M^H|, absolute."""
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def apply(self, f: FourierField) -> FourierField:
        f.check_same(FourierField.zeros(self.spec))
        return FourierField.from_vector(self.spec, self.data @ f.vector, f.reality)

    def quadratic_form(self, u: FourierField) -> float:
        """Re <Mu, u>."""
        v = u.vector
        return float(np.real(np.vdot(v, self.data @ v)))

    def spectral_apply(
        self, fn: Callable[[NDArray[np.float64]], NDArray[np.float64]], f: FourierField
    ) -> FourierField:
        """fn(M) f through the eigensystem."""
        values, vectors = self.eigensystem
        weights = fn(values) * (vectors.conj().T @ f.vector)
        return FourierField.from_vector(self.spec, vectors @ weights, f.reality)


def convolution_matrix(xi: FourierField) -> ComplexMatrix:
    """Matrix of u -> P(xi u): entry (k, k') = xi(k - k') when |k - k'|_inf <= K."""
    spec = xi.spec
    side, K, dim = spec.side, spec.K, spec.dim
    padded = np.zeros((4 * K + 1,) * dim, dtype=np.complex128)
    padded[(slice(K, 3 * K + 1),) * dim] = xi.coeffs
    flipped = padded[(slice(None, None, -1),) * dim]
    rows = np.empty((spec.n_modes, spec.n_modes), dtype=np.complex128)
    # row k reads padded[k - k' + 2K] over k', i.e. a reversed window of the padded array
    for r, index in enumerate(np.ndindex(*spec.shape)):
        start = tuple(2 * K - i for i in index)
        window = flipped[tuple(slice(s, s + side) for s in start)]
        rows[r] = window.ravel()
    return rows


def check_matrix_size(spec: TorusSpec) -> None:
    """Raise ResolutionError above settings.max_matrix_rows."""
    if spec.n_modes > settings.max_matrix_rows:
        raise ResolutionError(
            f"Dense matrix would have {spec.n_modes:,} rows "
            f"(limit {settings.max_matrix_rows:,}, ANDERSON_LAB_MAX_MATRIX_ROWS)"
        )


def assemble_matrix(xi: FourierField, c: float) -> OperatorMatrix:
    """Dense matrix of Lap + xi - c on the truncated Fourier basis.

    Raises:
        ResolutionError: If the lattice exceeds the row guard
    """
    spec = xi.spec
    check_matrix_size(spec)
    data = convolution_matrix(xi)
    diagonal = laplacian_symbol(spec).ravel() - c
    data[np.diag_indices_from(data)] += diagonal
    return OperatorMatrix(spec=spec, data=data)


def apply_regularized(xi: FourierField, c: float, u: FourierField) -> FourierField:
    """Matrix-free A_eps u = Lap u + P(xi u) - c u."""
    return u.laplacian() + product(xi, u) - c * u


def shift_constant(matrix: OperatorMatrix, margin: float) -> float:
    """K_Xi = lambda_max(A_eps) + margin, so that K_Xi - A_eps >= margin."""
    return matrix.lambda_max + margin


def resolvent_matrix(matrix: OperatorMatrix, K_Xi: float, f: FourierField) -> FourierField:
    """(K_Xi - A)^{-1} f from the eigensystem."""
    return matrix.spectral_apply(lambda lam: 1.0 / (K_Xi - lam), f)


def resolvent_iterative(
    xi: FourierField,
    c: float,
    K_Xi: float,
    f: FourierField,
    x0: Optional[FourierField] = None,
    maxiter: Optional[int] = None,
) -> FourierField:
    """(K_Xi - A_eps)^{-1} f by conjugate gradients on the positive-definite shifted form.

    Raises:
        ConvergenceError: If the residual stays above 1e-10 ||f||
    """
    spec = f.spec
    shape = (spec.n_modes, spec.n_modes)

    def matvec(v: NDArray[np.complex128]) -> NDArray[np.complex128]:
        u = FourierField.from_vector(spec, v)
        return (K_Xi * u - apply_regularized(xi, c, u)).vector

    op = scipy.sparse.linalg.LinearOperator(shape, matvec=matvec, dtype=np.complex128)
    target = l2_norm(f)
    if target == 0.0:
        return FourierField.zeros(spec, f.reality)
    iterations = 0

    def count(_: NDArray[np.complex128]) -> None:
        nonlocal iterations
        iterations += 1

    start = None if x0 is None else x0.vector
    solution, info = scipy.sparse.linalg.cg(
        op,
        f.vector,
        x0=start,
        rtol=0.01 * RESIDUAL_TOL,
        atol=0.0,
        maxiter=maxiter or 10 * spec.n_modes,
        callback=count,
    )
    u = FourierField.from_vector(spec, solution, f.reality and xi.reality)
    residual = l2_norm(f - (K_Xi * u - apply_regularized(xi, c, u)))
    if residual > RESIDUAL_TOL * target:
        raise ConvergenceError(
            f"cg stopped with residual {residual:.3e} (info={info}) after {iterations} steps",
            iterations=iterations,
            residual=residual,
        )
    logger.debug(f"cg converged in {iterations} steps, residual {residual:.3e}")
    return u
