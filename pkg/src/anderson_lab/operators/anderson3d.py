"""The renormalized Anderson Hamiltonian on the 3-d torus.

Domain elements are u = e^W u_flat with the second-level ansatz

    u_flat = Delta_{>N}(u_flat < Z + grad u_flat < W~ + B(u_flat)) + u_sharp,

and the operator acts through the conjugated form

    A u = e^W (Lap u_flat + 2 (1-Lap)W~ . grad u_flat + (1-Lap)Z u_flat)
        = e^W (Lap u_sharp + LZ o u_sharp + 2 LW~ o grad u_sharp + G(u_flat)).

Vector paraproducts are taken componentwise and summed. L = 1 - Lap.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import SpecMismatchError
from ..models.operator import ZProductReport
from ..models.run import GVariant
from ..noise.enhance import EnhancedNoise3D, ExpLift, exp_lift
from ..paracalc.commutators import commutator_C, commutator_CN, paralinearize
from ..paracalc.products import hi_lo, lo_hi, resonant, vec_lo_hi, vec_resonant
from ..spectral.dyadic import DyadicPartition, high
from ..spectral.lattice import FourierField, dot, l2_norm, product
from ..spectral.norms import besov_norm, holder_norm
from ..spectral.sampling import rough_field
from .ansatz import AnsatzMap, estimate_map_norm, find_cutoff, fixed_point
from .bundle import DOMAIN_REGULARITY, OperatorBundle, calibrate_constant, grad_norm_sq
from .matrix import OperatorMatrix, apply_regularized, assemble_matrix, shift_constant

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FlatSharpTriple:
    """Element of the discrete 3-d domain.

    Attributes:
        u: e^W u_flat, projected on the lattice
        u_flat: Conjugated function e^{-W} u
        u_sharp: H^2 remainder of the ansatz for u_flat
        N: Cutoff level
        residual: L^2 defect of the ansatz
        iterations: Fixed-point iterations (0 if u_flat was given)
    """

    u: FourierField
    u_flat: FourierField
    u_sharp: FourierField
    N: int
    residual: float = 0.0
    iterations: int = 0


@dataclass(frozen=True, eq=False)
class OperatorBundle3D(OperatorBundle):
    """Shifted 3-d operator with its noise and grid exponentials."""

    noise: EnhancedNoise3D
    lift: ExpLift

    @property
    def xi(self) -> FourierField:
        return self.noise.xi

    @property
    def renorm_constant(self) -> float:
        return self.noise.c_total


def _check_noise(u: FourierField, noise: EnhancedNoise3D) -> None:
    if noise.spec.dim != 3:
        raise SpecMismatchError("3-d operator used with a non 3-d noise")
    u.check_same(noise.xi)


def _hessian(u: FourierField) -> list[list[FourierField]]:
    grad = u.grad()
    return [[grad[a].partial(b) for b in range(3)] for a in range(3)]


def _sum(fields: Sequence[FourierField]) -> FourierField:
    total = fields[0]
    for f in fields[1:]:
        total = total + f
    return total


def _two_sided(fs: Sequence[FourierField], gs: Sequence[FourierField]) -> FourierField:
    """sum_a f_a < g_a + f_a > g_a."""
    return vec_lo_hi(fs, gs) + vec_lo_hi(gs, fs)


def b_xi_3d(u_flat: FourierField, noise: EnhancedNoise3D) -> FourierField:
    """B(u_flat) = L^{-1}[...], the bracket of paraproducts with the resonant noise terms."""
    _check_noise(u_flat, noise)
    u = u_flat
    gu = u.grad()
    hess = _hessian(u)
    Z, LZ = noise.Z, noise.LZ
    Wt, LWt = noise.Wtilde, noise.LWtilde
    grad_Wt = [Wt[b].grad() for b in range(3)]
    bracket = (
        lo_hi(u.laplacian(), Z)
        + 2.0 * vec_lo_hi(gu, Z.grad())
        + lo_hi(u, Z)
        + vec_lo_hi(u.laplacian().grad(), Wt)
        + 2.0 * _sum([vec_lo_hi(hess[a], [grad_Wt[b][a] for b in range(3)]) for a in range(3)])
        - vec_lo_hi(gu, Wt)
        + 2.0 * vec_lo_hi(LWt, gu)
        + lo_hi(LZ, u)
        + 2.0 * _two_sided(gu, noise.R1)
        + 2.0 * _two_sided((u,), (noise.R2,))
        + 2.0 * _two_sided(gu, noise.R3)
        + _two_sided((u,), (noise.R4,))
        + _two_sided(gu, noise.R5)
    )
    return bracket.bessel_inv()


def _ansatz_body(f: FourierField, noise: EnhancedNoise3D) -> tuple[FourierField, FourierField]:
    """(f < Z + grad f < W~ + B(f), B(f))."""
    B = b_xi_3d(f, noise)
    return lo_hi(f, noise.Z) + vec_lo_hi(f.grad(), noise.Wtilde) + B, B


def ansatz_map_3d(noise: EnhancedNoise3D, N: int) -> AnsatzMap:
    """T_N f = Delta_{>N}(f < Z + grad f < W~ + B(f))."""

    def apply(f: FourierField) -> FourierField:
        return high(_ansatz_body(f, noise)[0], N)

    return apply


def choose_N_3d(
    noise: EnhancedNoise3D,
    target_contraction: float = 0.5,
    iterations: int = 100,
    probes: int = 4,
    seed: int = 0,
) -> int:
    """Smallest contracting cutoff level of the 3-d ansatz map.

    Raises:
        ResolutionError: If 2^N passes K sqrt(3) first
    """
    N, _ = find_cutoff(
        lambda level: ansatz_map_3d(noise, level),
        noise.spec,
        target_contraction,
        iterations,
        probes,
        seed,
    )
    return N


def _lift(noise: EnhancedNoise3D, lift: Optional[ExpLift]) -> ExpLift:
    return exp_lift(noise) if lift is None else lift


def gamma_map_3d(
    u_sharp: FourierField,
    noise: EnhancedNoise3D,
    N: int,
    lift: Optional[ExpLift] = None,
) -> FlatSharpTriple:
    """Gamma u_sharp = u_flat and u = e^W u_flat.

    Raises:
        ConvergenceError: If the fixed point needs more than 200 iterations
        OverflowFieldError: If e^W overflows
    """
    _check_noise(u_sharp, noise)
    T = ansatz_map_3d(noise, N)
    u_flat, iterations = fixed_point(T, u_sharp)
    residual = l2_norm(u_flat - T(u_flat) - u_sharp)
    u = _lift(noise, lift).multiply("W", u_flat)
    return FlatSharpTriple(u, u_flat, u_sharp, N, residual, iterations)


def gamma_inverse_3d(u_flat: FourierField, noise: EnhancedNoise3D, N: int) -> FourierField:
    """u_sharp = u_flat - Delta_{>N}(u_flat < Z + grad u_flat < W~ + B(u_flat))."""
    _check_noise(u_flat, noise)
    return u_flat - ansatz_map_3d(noise, N)(u_flat)


def triple_from_flat(
    u_flat: FourierField, noise: EnhancedNoise3D, N: int, lift: Optional[ExpLift] = None
) -> FlatSharpTriple:
    """Triple with the exact remainder of a given u_flat."""
    u = _lift(noise, lift).multiply("W", u_flat)
    return FlatSharpTriple(u, u_flat, gamma_inverse_3d(u_flat, noise, N), N)


def conjugated_bracket(u_flat: FourierField, noise: EnhancedNoise3D) -> FourierField:
    """Lap u_flat + 2 LW~ . grad u_flat + LZ u_flat."""
    return (
        u_flat.laplacian()
        + 2.0 * dot(noise.LWtilde, u_flat.grad())
        + product(noise.LZ, u_flat)
    )


def g_consistent(triple: FlatSharpTriple, noise: EnhancedNoise3D) -> FourierField:
    """G(u_flat) with every resonant product against Delta_{>N}(...) expanded by C_N.

    With T = Delta_{>N}(u < Z + grad u < W~ + B(u)):
        G = Lap T + 2 sum_a (LW~_a < d_a u + LW~_a > d_a u) + LZ < u + LZ > u
            + 2 sum_a LW~_a o d_a T + LZ o T,
    and each LW~_a o d_a T, LZ o T is written through C_N and the resonances R1..R5.
    """
    u, N = triple.u_flat, triple.N
    gu = u.grad()
    hess = _hessian(u)
    Z, LZ = noise.Z, noise.LZ
    Wt, LWt = noise.Wtilde, noise.LWtilde
    grad_Z = Z.grad()
    body, B = _ansatz_body(u, noise)
    T = high(body, N)
    grad_B = B.grad()
    high_B = high(B, N)

    resonant_dT: list[FourierField] = []
    for a in range(3):
        terms = [
            commutator_CN(gu[a], Z, LWt[a], N),
            product(gu[a], noise.R1[a]),
            commutator_CN(u, grad_Z[a], LWt[a], N),
            resonant(LWt[a], high(vec_lo_hi(hess[a], Wt), N)),
            resonant(LWt[a], high(grad_B[a], N)),
        ]
        for b in range(3):
            terms.append(commutator_CN(gu[b], Wt[b].partial(a), LWt[a], N))
        resonant_dT.append(_sum(terms))
    resonant_dT_total = (
        _sum(resonant_dT) + product(u, noise.R2) + dot(gu, noise.R3)
    )
    resonant_T = (
        commutator_CN(u, Z, LZ, N)
        + product(u, noise.R4)
        + _sum([commutator_CN(gu[b], Wt[b], LZ, N) for b in range(3)])
        + dot(gu, noise.R5)
        + resonant(LZ, high_B)
    )
    return (
        T.laplacian()
        + 2.0 * _two_sided(LWt, gu)
        + lo_hi(LZ, u)
        + hi_lo(LZ, u)
        + 2.0 * resonant_dT_total
        + resonant_T
    )


def g_printed_3d(triple: FlatSharpTriple, noise: EnhancedNoise3D) -> FourierField:
    """G(u_flat) as printed: B + 2 grad u o (LW~ o Z) + 2 C(grad u, Z, LW~) + u o (LW~ o grad Z)
    + C(u, grad Z, LW~) + 2 LW~ o (grad^2 u < W~) + 2 grad u o (LW~ o grad W~)
    + 2 C(grad u, grad W~, LW~) + 2 LW~ o grad B."""
    u = triple.u_flat
    gu = u.grad()
    hess = _hessian(u)
    Z, Wt, LWt = noise.Z, noise.Wtilde, noise.LWtilde
    grad_Z = Z.grad()
    B = b_xi_3d(u, noise)
    grad_B = B.grad()
    return (
        B
        + 2.0 * vec_resonant(gu, noise.R1)
        + 2.0 * _sum([commutator_C(gu[a], Z, LWt[a]) for a in range(3)])
        + resonant(u, noise.R2)
        + _sum([commutator_C(u, grad_Z[a], LWt[a]) for a in range(3)])
        + 2.0 * _sum([resonant(LWt[a], vec_lo_hi(hess[a], Wt)) for a in range(3)])
        + 2.0 * vec_resonant(gu, noise.R3)
        + 2.0
        * _sum(
            [commutator_C(gu[b], Wt[b].partial(a), LWt[a]) for a in range(3) for b in range(3)]
        )
        + 2.0 * vec_resonant(LWt, grad_B)
    )


def apply_A_3d(
    triple: FlatSharpTriple,
    noise: EnhancedNoise3D,
    lift: Optional[ExpLift] = None,
    variant: GVariant = GVariant.DERIVED,
) -> FourierField:
    """A u = e^W (Lap u_sharp + LZ o u_sharp + 2 LW~ o grad u_sharp + G(u_flat))."""
    _check_noise(triple.u_flat, noise)
    if GVariant(variant) is GVariant.PRINTED:
        G = g_printed_3d(triple, noise)
    else:
        G = g_consistent(triple, noise)
    s = triple.u_sharp
    inner_part = (
        s.laplacian()
        + resonant(noise.LZ, s)
        + 2.0 * vec_resonant(noise.LWtilde, s.grad())
        + G
    )
    return _lift(noise, lift).multiply("W", inner_part)


def conjugation_defect(
    u_flat: FourierField,
    noise: EnhancedNoise3D,
    N: int,
    lift: Optional[ExpLift] = None,
    variant: GVariant = GVariant.DERIVED,
) -> float:
    """Relative L^2 gap between A u and e^W (Lap u_flat + 2 LW~ . grad u_flat + LZ u_flat)."""
    lift = _lift(noise, lift)
    triple = triple_from_flat(u_flat, noise, N, lift)
    conjugated = lift.multiply("W", conjugated_bracket(u_flat, noise))
    gap = l2_norm(apply_A_3d(triple, noise, lift, variant) - conjugated)
    return gap / max(l2_norm(conjugated), 1e-300)


def direct_defect(
    u_flat: FourierField,
    noise: EnhancedNoise3D,
    N: int,
    lift: Optional[ExpLift] = None,
    variant: GVariant = GVariant.DERIVED,
) -> float:
    """Relative L^2 gap between A u and Lap u + xi_eps u - (c1 + c2) u.

    The two differ by the lattice truncation of e^W, not to rounding.
    """
    lift = _lift(noise, lift)
    triple = triple_from_flat(u_flat, noise, N, lift)
    direct = apply_regularized(noise.xi, noise.c_total, triple.u)
    gap = l2_norm(apply_A_3d(triple, noise, lift, variant) - direct)
    return gap / max(l2_norm(direct), 1e-300)


def g_deviation_3d(triple: FlatSharpTriple, noise: EnhancedNoise3D) -> float:
    """||G_printed - G_consistent|| relative to ||G_consistent||."""
    consistent = g_consistent(triple, noise)
    relative = l2_norm(g_printed_3d(triple, noise) - consistent) / max(
        l2_norm(consistent), 1e-300
    )
    if relative > 1e-8:
        logger.warning(f"Printed 3-d G deviates from the consistent G by {relative:.3e}")
    return relative


def assemble_matrix_eps_3d(noise: EnhancedNoise3D) -> OperatorMatrix:
    """Dense Lap + xi_eps - (c1 + c2).

    Raises:
        ResolutionError: Above settings.max_matrix_rows rows
    """
    return assemble_matrix(noise.xi, noise.c_total)


def domain_samples_3d(
    noise: EnhancedNoise3D,
    N: int,
    count: int,
    seed: int = 0,
    sample_set: int = 0,
    lift: Optional[ExpLift] = None,
) -> list[FlatSharpTriple]:
    """Triples Gamma(u_sharp) for random u_sharp at the edge of H^2.5."""
    lift = _lift(noise, lift)
    triples = []
    for i in range(count):
        rng = np.random.default_rng([seed, sample_set, i])
        u_sharp = rough_field(noise.spec, DOMAIN_REGULARITY, rng)
        triples.append(gamma_map_3d(u_sharp, noise, N, lift))
    return triples


def exp_minus_2w_sup(lift: ExpLift) -> float:
    """sup of e^{-2W} on the lift grid."""
    return float(np.max(lift.grids["-2W"]))


def flat_form_ratio(triple: FlatSharpTriple, matrix: OperatorMatrix, lift: ExpLift) -> float:
    """(||grad u_flat||^2 / ||e^{-2W}||_inf + <u, A u>) / ||u||^2."""
    norm_sq = l2_norm(triple.u) ** 2
    gradient = grad_norm_sq(triple.u_flat) / exp_minus_2w_sup(lift)
    return (gradient + matrix.quadratic_form(triple.u)) / norm_sq


def shift_and_bundle_3d(
    noise: EnhancedNoise3D,
    margin: float = 1.0,
    N: Optional[int] = None,
    target_contraction: float = 0.5,
    calibration_samples: int = 20,
    seed: int = 0,
    iterations: int = 100,
    probes: int = 4,
) -> OperatorBundle3D:
    """3-d counterpart of shift_and_bundle.

    Raises:
        ValueError: If margin is not positive
        ResolutionError: If no cutoff level contracts or the matrix is too large
        OverflowFieldError: If e^W overflows
    """
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    lift = exp_lift(noise)
    if N is None:
        N = choose_N_3d(noise, target_contraction, iterations, probes, seed)
    contraction = estimate_map_norm(ansatz_map_3d(noise, N), noise.spec, iterations, probes, seed)
    matrix = assemble_matrix_eps_3d(noise)
    K_Xi = shift_constant(matrix, margin)
    samples = domain_samples_3d(noise, N, calibration_samples, seed, 0, lift)
    C_Xi = calibrate_constant([flat_form_ratio(t, matrix, lift) for t in samples])
    logger.info(
        f"3-d bundle K={noise.spec.K} eps={noise.eps:g}: N={N}, ||T_N||~{contraction:.3g}, "
        f"K_Xi={K_Xi:.6g}, C_Xi={C_Xi:.6g}"
    )
    return OperatorBundle3D(
        matrix_eps=matrix,
        N=N,
        K_Xi=K_Xi,
        C_Xi=C_Xi,
        margin=margin,
        contraction=contraction,
        noise=noise,
        lift=lift,
    )


def h1_flat_bound_check(bundle: OperatorBundle3D, triple: FlatSharpTriple) -> float:
    """Slack ||e^{-2W}||_inf (-<u, A u> + C_Xi ||u||^2) - ||grad u_flat||^2."""
    form = -bundle.matrix_eps.quadratic_form(triple.u) + bundle.C_Xi * l2_norm(triple.u) ** 2
    return exp_minus_2w_sup(bundle.lift) * form - grad_norm_sq(triple.u_flat)


def z_product_check(noise: EnhancedNoise3D, alpha: float) -> ZProductReport:
    """e^{2W}(1-Lap)Z directly and through the paralinearization e^{2W} = 2e^{2W} < W + R.

    With E = e^{2W} projected on the lattice, the split route is
        E < LZ + E > LZ + C(2E, W, LZ) + 2E (W o LZ) + R o LZ.

    Raises:
        OverflowFieldError: If e^{2W} overflows
    """
    exp_lift(noise)
    part = DyadicPartition.for_spec(noise.spec)
    LZ = noise.LZ
    para_part, remainder = paralinearize(
        lambda x: np.exp(2.0 * x), lambda x: 2.0 * np.exp(2.0 * x), noise.W, part
    )
    E = para_part + remainder
    dE = 2.0 * E
    direct = product(E, LZ)
    split = (
        lo_hi(E, LZ, part)
        + hi_lo(E, LZ, part)
        + commutator_C(dE, noise.W, LZ, part)
        + product(dE, resonant(noise.W, LZ, part))
        + resonant(remainder, LZ, part)
    )
    difference = l2_norm(direct - split)
    return ZProductReport(
        direct=besov_norm(direct, alpha - 1.0, float("inf"), float("inf"), part),
        split=besov_norm(split, alpha - 1.0, float("inf"), float("inf"), part),
        difference=difference,
        relative=difference / max(l2_norm(direct), 1e-300),
        paralinear_remainder=holder_norm(remainder, 2.0 * alpha, part),
    )

