"""Spatial white noise on the lattice and its mollification."""

import logging

import numpy as np

from ..errors import DomainViolationError
from ..models.torus import TorusSpec
from ..spectral.lattice import FourierField, k_norm
from ..spectral.sampling import hermitian_gaussian
from .mollifiers import Mollifier

logger = logging.getLogger(__name__)


def sample_white_noise(seed: int, spec: TorusSpec) -> FourierField:
    """White-noise coefficients: i.i.d. standard complex Gaussians with hermitian symmetry.

    In 2-d the zero mode is a real standard Gaussian; in 3-d it is 0. Draws are
    shell-ordered, so the realization at cutoff K is the restriction of the one at
    any larger cutoff with the same seed.
    """
    rng = np.random.default_rng(seed)
    three_d = spec.dim == 3
    coeffs = hermitian_gaussian(spec, rng, real_zero_mode=not three_d)
    return FourierField(spec, coeffs, reality=True, zero_mode_excluded=three_d)


def mollify(xi: FourierField, eps: float, m: Mollifier) -> FourierField:
    """xi_eps(k) = m(eps |k|) xi(k)."""
    if eps <= 0:
        raise DomainViolationError(f"eps must be positive, got {eps}")
    out = xi.multiply(m(eps * k_norm(xi.spec)))
    return FourierField(out.spec, out.coeffs, xi.reality, xi.zero_mode_excluded)


def lattice_truncated(eps: float, m: Mollifier, K: int) -> bool:
    """Whether m(eps .) is nonzero somewhere outside |k|_inf <= K."""
    truncated = (K + 1) * eps < m.support
    if truncated:
        logger.warning(f"m(eps k) with eps={eps:g} does not vanish outside the K={K} lattice")
    return truncated
