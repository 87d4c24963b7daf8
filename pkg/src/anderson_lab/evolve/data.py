"""Initial data for the regularized problems.

The limit operator H is represented by the finest rung of a ladder (the reference bundle).
Every rung must share its shift K_Xi with the reference, so that H_eps^{-1} H maps the
reference domain onto the rung's domain.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..models.torus import TorusSpec
from ..operators.anderson2d import OperatorBundle2D, gamma_map
from ..operators.anderson3d import OperatorBundle3D, gamma_map_3d
from ..operators.bundle import DOMAIN_REGULARITY, OperatorBundle, neg_h_power, resolvent_apply
from ..spectral.lattice import FourierField, l2_norm
from ..spectral.sampling import rough_field

logger = logging.getLogger(__name__)

# random form-domain data and velocities sit at the edge of H^{FORM_REGULARITY}
FORM_REGULARITY = 1.5


@dataclass(frozen=True, eq=False)
class DomainData:
    """u0 in the reference domain and its image u0_eps = H_eps^{-1} H u0.

    Attributes:
        u0: Reference datum
        u0_eps: Datum of the regularized problem
        distance: ||u0_eps - u0||_{L^2}
        residual: ||H_eps u0_eps - H u0|| / ||H u0||
    """

    u0: FourierField
    u0_eps: FourierField
    distance: float
    residual: float


def _check_shift(reference: OperatorBundle, bundle: OperatorBundle) -> None:
    if not math.isclose(reference.K_Xi, bundle.K_Xi, rel_tol=1e-12, abs_tol=1e-12):
        logger.warning(
            f"Rung shift {bundle.K_Xi:.6g} differs from the reference shift "
            f"{reference.K_Xi:.6g}; prepared data pair different operators"
        )


def domain_initial(bundle: OperatorBundle, u0_sharp: FourierField) -> FourierField:
    """u0 = Gamma(u0_sharp) in 2-d, e^W Gamma(u0_sharp) in 3-d."""
    if isinstance(bundle, OperatorBundle2D):
        return gamma_map(u0_sharp, bundle.noise, bundle.N).u
    if isinstance(bundle, OperatorBundle3D):
        return gamma_map_3d(u0_sharp, bundle.noise, bundle.N, bundle.lift).u
    raise TypeError(f"No paracontrolled ansatz for {type(bundle).__name__}")


def lift_to_rung(
    reference: OperatorBundle, bundle: OperatorBundle, u0: FourierField
) -> FourierField:
    """H_eps^{-1} H u0."""
    _check_shift(reference, bundle)
    return resolvent_apply(bundle, -reference.apply_H(u0))


def prepare_domain_data(
    reference: OperatorBundle, bundle: OperatorBundle, u0_sharp: FourierField
) -> DomainData:
    """Build u0 from its remainder with the reference ansatz and map it to the rung."""
    u0 = domain_initial(reference, u0_sharp)
    u0_eps = lift_to_rung(reference, bundle, u0)
    h_u0 = reference.apply_H(u0)
    residual = l2_norm(bundle.apply_H(u0_eps) - h_u0) / max(l2_norm(h_u0), 1e-300)
    distance = l2_norm(u0_eps - u0)
    logger.debug(f"Domain data: ||u0_eps - u0|| = {distance:.3e}, residual {residual:.1e}")
    return DomainData(u0, u0_eps, distance, residual)


def energy_smoothing(reference: OperatorBundle, u0: FourierField, eps: float) -> FourierField:
    """(1 + eps sqrt(-H))^{-1} u0."""
    if eps == 0.0:
        return u0
    shift = reference.K_Xi
    return reference.matrix_eps.spectral_apply(
        lambda lam: 1.0 / (1.0 + eps * np.sqrt(np.maximum(shift - lam, 0.0))), u0
    )


def prepare_energy_data(
    reference: OperatorBundle, bundle: OperatorBundle, u0: FourierField, eps: float
) -> FourierField:
    """u0_eps = H_eps^{-1} H (1 + eps sqrt(-H))^{-1} u0 for data in the form domain.

    With bundle = reference this is the smoothing (1 + eps sqrt(-H))^{-1} u0 alone.
    """
    smoothed = energy_smoothing(reference, u0, eps)
    if bundle is reference:
        return smoothed
    return lift_to_rung(reference, bundle, smoothed)


def prepare_wave_data(
    reference: OperatorBundle, bundle: OperatorBundle, u0: FourierField, u1: FourierField
) -> tuple[FourierField, FourierField]:
    """(H_eps^{-1} H u0, (-H_eps)^{-1/2} (-H)^{1/2} u1)."""
    u0_eps = lift_to_rung(reference, bundle, u0)
    u1_eps = neg_h_power(bundle, neg_h_power(reference, u1, 0.5), -0.5)
    return u0_eps, u1_eps


def initial_sharp(spec: TorusSpec, seed: int, amplitude: float) -> FourierField:
    """Random H^2 remainder of the domain datum."""
    rng = np.random.default_rng([seed, 23])
    return rough_field(spec, DOMAIN_REGULARITY, rng, sigma=amplitude)


def initial_form_datum(spec: TorusSpec, seed: int, amplitude: float) -> FourierField:
    """Random datum in the form domain."""
    return rough_field(spec, FORM_REGULARITY, np.random.default_rng([seed, 27]), sigma=amplitude)


def initial_velocity(spec: TorusSpec, seed: int, amplitude: float) -> FourierField:
    """Random initial velocity of wave runs."""
    return rough_field(spec, FORM_REGULARITY, np.random.default_rng([seed, 29]), sigma=amplitude)
