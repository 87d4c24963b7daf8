"""The renormalized Anderson Hamiltonian on the 2-d torus.

Domain elements are pairs (u, u_sharp) with the paracontrolled ansatz

    u = Delta_{>N}(u < X + B(u)) + u_sharp,
    B(u) = (1-Lap)^{-1}(Lap u < X + 2 grad u < grad X + xi < u - u < Xi2),

and the operator acts as A u = Lap u_sharp + u_sharp o xi + G(u). At finite K the
derived G makes A u equal Lap u + xi_eps u - c_eps u to rounding.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import SpecMismatchError
from ..models.run import GVariant
from ..noise.enhance import EnhancedNoise2D
from ..paracalc.commutators import commutator_CN
from ..paracalc.products import hi_lo, hi_res, lo_hi, resonant, vec_lo_hi
from ..spectral.dyadic import high, low
from ..spectral.lattice import FourierField, l2_norm, product
from ..spectral.sampling import rough_field
from .ansatz import (
    AnsatzMap,
    estimate_map_norm,
    find_cutoff,
    fixed_point,
)
from .bundle import (
    DOMAIN_REGULARITY,
    OperatorBundle,
    calibrate_constant,
    grad_norm_sq,
)
from .matrix import OperatorMatrix, apply_regularized, assemble_matrix, shift_constant

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ParacontrolledPair:
    """Element of the discrete 2-d domain.

    Attributes:
        u: The function
        u_sharp: Its H^2 remainder
        N: Cutoff level of the ansatz
        residual: L^2 norm of u - Delta_{>N}(u < X + B(u)) - u_sharp
        iterations: Fixed-point iterations spent building u (0 if u was given)
    """

    u: FourierField
    u_sharp: FourierField
    N: int
    residual: float = 0.0
    iterations: int = 0


@dataclass(frozen=True, eq=False)
class OperatorBundle2D(OperatorBundle):
    """Shifted 2-d operator with its noise."""

    noise: EnhancedNoise2D

    @property
    def xi(self) -> FourierField:
        return self.noise.xi

    @property
    def renorm_constant(self) -> float:
        return self.noise.c_eps


def _check_noise(u: FourierField, noise: EnhancedNoise2D) -> None:
    if noise.spec.dim != 2:
        raise SpecMismatchError("2-d operator used with a non 2-d noise")
    u.check_same(noise.xi)


def b_xi(u: FourierField, noise: EnhancedNoise2D) -> FourierField:
    """B(u) = (1-Lap)^{-1}(Lap u < X + 2 grad u < grad X + xi < u - u < Xi2)."""
    _check_noise(u, noise)
    bracket = (
        lo_hi(u.laplacian(), noise.X)
        + 2.0 * vec_lo_hi(u.grad(), noise.X.grad())
        + lo_hi(noise.xi, u)
        - lo_hi(u, noise.Xi2)
    )
    return bracket.bessel_inv()


def ansatz_map(noise: EnhancedNoise2D, N: int) -> AnsatzMap:
    """T_N f = Delta_{>N}(f < X + B(f))."""

    def apply(f: FourierField) -> FourierField:
        return high(lo_hi(f, noise.X) + b_xi(f, noise), N)

    return apply


def choose_N(
    noise: EnhancedNoise2D,
    target_contraction: float = 0.5,
    iterations: int = 100,
    probes: int = 4,
    seed: int = 0,
) -> int:
    """Smallest cutoff level at which the ansatz map contracts by target_contraction.

    Raises:
        ResolutionError: If 2^N passes K sqrt(2) first
    """
    N, _ = find_cutoff(
        lambda level: ansatz_map(noise, level),
        noise.spec,
        target_contraction,
        iterations,
        probes,
        seed,
    )
    return N


def gamma_map(u_sharp: FourierField, noise: EnhancedNoise2D, N: int) -> ParacontrolledPair:
    """Gamma u_sharp: the u whose ansatz remainder is u_sharp.

    Raises:
        ConvergenceError: If the fixed point needs more than 200 iterations
    """
    _check_noise(u_sharp, noise)
    T = ansatz_map(noise, N)
    u, iterations = fixed_point(T, u_sharp)
    residual = l2_norm(u - T(u) - u_sharp)
    return ParacontrolledPair(u=u, u_sharp=u_sharp, N=N, residual=residual, iterations=iterations)


def gamma_inverse(u: FourierField, noise: EnhancedNoise2D, N: int) -> FourierField:
    """u_sharp = u - Delta_{>N}(u < X + B(u))."""
    _check_noise(u, noise)
    return u - ansatz_map(noise, N)(u)


def pair_from_u(u: FourierField, noise: EnhancedNoise2D, N: int) -> ParacontrolledPair:
    """Pair with the exact remainder of a given u."""
    return ParacontrolledPair(u=u, u_sharp=gamma_inverse(u, noise, N), N=N)


def g_derived(pair: ParacontrolledPair, noise: EnhancedNoise2D) -> FourierField:
    """G(u) = Delta_{<=N}(u < xi + u > xi) + Delta_{>N}(u < X + B(u) + u < Xi2)
    + u Xi2 + C_N(u, X, xi) + (Delta_{>N} B(u)) o xi."""
    u, N = pair.u, pair.N
    B = b_xi(u, noise)
    return (
        low(lo_hi(u, noise.xi) + hi_lo(u, noise.xi), N)
        + high(lo_hi(u, noise.X) + B + lo_hi(u, noise.Xi2), N)
        + product(u, noise.Xi2)
        + commutator_CN(u, noise.X, noise.xi, N)
        + resonant(high(B, N), noise.xi)
    )


def g_printed(pair: ParacontrolledPair, noise: EnhancedNoise2D) -> FourierField:
    """G(u) = Delta_{<=N}(u < xi + u > xi + u < Xi2)
    + Delta_{>N}(-B(u) - u < X + u >= Xi2 + C_N(u, X, xi) + B(u) o xi)."""
    u, N = pair.u, pair.N
    B = b_xi(u, noise)
    return low(lo_hi(u, noise.xi) + hi_lo(u, noise.xi) + lo_hi(u, noise.Xi2), N) + high(
        -B
        - lo_hi(u, noise.X)
        + hi_res(u, noise.Xi2)
        + commutator_CN(u, noise.X, noise.xi, N)
        + resonant(B, noise.xi),
        N,
    )


def apply_A(
    pair: ParacontrolledPair,
    noise: EnhancedNoise2D,
    variant: GVariant = GVariant.DERIVED,
) -> FourierField:
    """A u = Lap u_sharp + u_sharp o xi + G(u)."""
    _check_noise(pair.u, noise)
    G = g_printed(pair, noise) if GVariant(variant) is GVariant.PRINTED else g_derived(pair, noise)
    return pair.u_sharp.laplacian() + resonant(pair.u_sharp, noise.xi) + G


def g_deviation(pair: ParacontrolledPair, noise: EnhancedNoise2D) -> float:
    """||G_printed(u) - G_derived(u)||_{L^2} relative to ||G_derived(u)||."""
    derived = g_derived(pair, noise)
    gap = l2_norm(g_printed(pair, noise) - derived)
    relative = gap / max(l2_norm(derived), 1e-300)
    if relative > 1e-8:
        logger.warning(f"Printed G deviates from the derived G by {relative:.3e} (relative)")
    return relative


def agreement_defect(
    u: FourierField,
    noise: EnhancedNoise2D,
    N: int,
    variant: GVariant = GVariant.DERIVED,
) -> float:
    """||A u - (Lap u + xi_eps u - c_eps u)||_{L^2} for the pair built from u."""
    pair = pair_from_u(u, noise, N)
    direct = apply_regularized(noise.xi, noise.c_eps, u)
    return l2_norm(apply_A(pair, noise, variant) - direct)


def assemble_matrix_eps(noise: EnhancedNoise2D) -> OperatorMatrix:
    """Dense Lap + xi_eps - c_eps.

    Raises:
        ResolutionError: Above settings.max_matrix_rows rows
    """
    return assemble_matrix(noise.xi, noise.c_eps)


def domain_samples(
    noise: EnhancedNoise2D, N: int, count: int, seed: int = 0, sample_set: int = 0
) -> list[ParacontrolledPair]:
    """Pairs Gamma(u_sharp) for random u_sharp at the edge of H^2.5.

    Different `sample_set` values give disjoint streams (calibration vs holdout).
    """
    pairs = []
    for i in range(count):
        rng = np.random.default_rng([seed, sample_set, i])
        u_sharp = rough_field(noise.spec, DOMAIN_REGULARITY, rng)
        pairs.append(gamma_map(u_sharp, noise, N))
    return pairs


def form_ratio(pair: ParacontrolledPair, matrix: OperatorMatrix) -> float:
    """(1/2 ||grad u_sharp||^2 + <u, A u>) / ||u||^2."""
    norm_sq = l2_norm(pair.u) ** 2
    return (0.5 * grad_norm_sq(pair.u_sharp) + matrix.quadratic_form(pair.u)) / norm_sq


def shift_and_bundle(
    noise: EnhancedNoise2D,
    margin: float = 1.0,
    N: Optional[int] = None,
    target_contraction: float = 0.5,
    calibration_samples: int = 20,
    seed: int = 0,
    iterations: int = 100,
    probes: int = 4,
) -> OperatorBundle2D:
    """Assemble A_eps, shift it by K_Xi = lambda_max + margin and calibrate C_Xi.

    Raises:
        ValueError: If margin is not positive
        ResolutionError: If no cutoff level contracts or the matrix is too large
    """
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    if N is None:
        N = choose_N(noise, target_contraction, iterations, probes, seed)
    contraction = estimate_map_norm(ansatz_map(noise, N), noise.spec, iterations, probes, seed)
    matrix = assemble_matrix_eps(noise)
    K_Xi = shift_constant(matrix, margin)
    ratios = [
        form_ratio(pair, matrix)
        for pair in domain_samples(noise, N, calibration_samples, seed, sample_set=0)
    ]
    C_Xi = calibrate_constant(ratios)
    logger.info(
        f"2-d bundle K={noise.spec.K} eps={noise.eps:g}: N={N}, ||T_N||~{contraction:.3g}, "
        f"K_Xi={K_Xi:.6g}, C_Xi={C_Xi:.6g}"
    )
    return OperatorBundle2D(
        matrix_eps=matrix,
        N=N,
        K_Xi=K_Xi,
        C_Xi=C_Xi,
        margin=margin,
        contraction=contraction,
        noise=noise,
    )


def lower_bound_check(bundle: OperatorBundle2D, pair: ParacontrolledPair) -> float:
    """Slack -<u, A u> + C_Xi ||u||^2 - 1/2 ||grad u_sharp||^2 (non-negative once calibrated)."""
    return (
        -bundle.matrix_eps.quadratic_form(pair.u)
        + bundle.C_Xi * l2_norm(pair.u) ** 2
        - 0.5 * grad_norm_sq(pair.u_sharp)
    )
