"""Ratio sweeps for the paraproduct, commutator and paralinearization estimates.

Each case samples rough random fields at the edge of the regularities an estimate
assumes and records lhs / rhs. An estimate is "empirically bounded" when the maximum
ratio is finite and changes by at most a factor 2 under K -> 2K for the same draws.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..models.sweep import RatioSweep, ResolutionComparison
from ..models.torus import TorusSpec
from ..spectral.dyadic import DyadicPartition
from ..spectral.lattice import FourierField
from ..spectral.norms import holder_norm, lp_norm, sobolev_norm
from ..spectral.sampling import rough_field
from .commutators import commutator_C, para_resolvent_R, paralinearize
from .products import hi_lo, lo_hi, resonant

logger = logging.getLogger(__name__)

# Margin between a sample's regularity edge and the exponent it is measured in
EDGE = 0.1


@dataclass(frozen=True)
class EstimateCase:
    """One estimate: sample regularities and the two sides of the inequality."""

    name: str
    regularities: tuple[float, ...]
    ratio: Callable[[tuple[FourierField, ...], DyadicPartition], tuple[float, float]]
    sigma: float = 1.0


def _lo_hi_l2(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    beta, delta = 0.5, 0.1
    lhs = sobolev_norm(lo_hi(f, g, part), beta - delta)
    return lhs, lp_norm(f, 2) * holder_norm(g, beta, part)


def _hi_lo_bounded(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    alpha = 0.5
    lhs = sobolev_norm(hi_lo(f, g, part), alpha)
    return lhs, sobolev_norm(f, alpha) * lp_norm(g, math.inf)


def _lo_hi_negative(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    alpha, beta = -0.4, 0.8
    lhs = sobolev_norm(lo_hi(f, g, part), alpha + beta)
    return lhs, sobolev_norm(f, alpha) * holder_norm(g, beta, part)


def _hi_lo_negative(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    alpha, beta = 0.8, -0.4
    lhs = sobolev_norm(hi_lo(f, g, part), alpha + beta)
    return lhs, sobolev_norm(f, alpha) * holder_norm(g, beta, part)


def _resonant(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    alpha, beta = 0.6, -0.4
    lhs = sobolev_norm(resonant(f, g, part), alpha + beta)
    return lhs, sobolev_norm(f, alpha) * holder_norm(g, beta, part)


def _commutator(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g, h = fs
    alpha, beta, gamma = 0.9, -0.4, -0.4
    lhs = sobolev_norm(commutator_C(f, g, h, part), alpha + beta + gamma)
    rhs = sobolev_norm(f, alpha) * holder_norm(g, beta, part) * holder_norm(h, gamma, part)
    return lhs, rhs


def _para_resolvent(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    f, g = fs
    alpha, beta = 0.5, -0.7
    lhs = sobolev_norm(para_resolvent_R(f, g, part), alpha + beta + 2.0)
    return lhs, sobolev_norm(f, alpha) * holder_norm(g, beta, part)


def _paralinear_exp(fs: tuple[FourierField, ...], part: DyadicPartition) -> tuple[float, float]:
    (f,) = fs
    alpha = 0.4
    _, remainder = paralinearize(np.exp, np.exp, f, part)
    lhs = holder_norm(remainder, 2.0 * alpha, part)
    return lhs, 1.0 + holder_norm(f, alpha, part) ** 2


ESTIMATE_CASES: dict[str, EstimateCase] = {
    case.name: case
    for case in [
        EstimateCase("lo_hi_l2", (0.0, 0.5), _lo_hi_l2),
        EstimateCase("hi_lo_bounded", (0.5, 1.5), _hi_lo_bounded),
        EstimateCase("lo_hi_negative", (-0.4, 0.8), _lo_hi_negative),
        EstimateCase("hi_lo_negative", (0.8, -0.4), _hi_lo_negative),
        EstimateCase("resonant", (0.6, -0.4), _resonant),
        EstimateCase("commutator", (0.9, -0.4, -0.4), _commutator),
        EstimateCase("para_resolvent", (0.5, -0.7), _para_resolvent),
        EstimateCase("paralinear_exp", (0.4,), _paralinear_exp, sigma=0.3),
    ]
}


def _draws(
    case: EstimateCase, spec: TorusSpec, samples: int, seed: int
) -> list[tuple[FourierField, ...]]:
    # one generator per field so the draws at K are restrictions of the draws at 2K
    return [
        tuple(
            rough_field(spec, reg + EDGE, np.random.default_rng([seed, s, i]), sigma=case.sigma)
            for i, reg in enumerate(case.regularities)
        )
        for s in range(samples)
    ]


def ratio_sweep(name: str, spec: TorusSpec, samples: int, seed: int = 0) -> RatioSweep:
    """Ratios of one named estimate over `samples` random draws.

    Raises:
        KeyError: If the estimate name is unknown
    """
    case = ESTIMATE_CASES[name]
    part = DyadicPartition.for_spec(spec)
    ratios = []
    for fields in _draws(case, spec, samples, seed):
        lhs, rhs = case.ratio(fields, part)
        ratios.append(lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf))
    sweep = RatioSweep(name=name, K=spec.K, samples=samples, ratios=ratios)
    logger.debug(f"{name} at K={spec.K}: max ratio {sweep.max_ratio:.4g}")
    return sweep


def resolution_comparison(
    name: str, spec: TorusSpec, samples: int, seed: int = 0
) -> ResolutionComparison:
    """The same sweep at K and 2K."""
    comparison = ResolutionComparison(
        coarse=ratio_sweep(name, spec, samples, seed),
        fine=ratio_sweep(name, spec.with_K(2 * spec.K), samples, seed),
    )
    if not comparison.stable:
        logger.warning(f"{name}: max ratio moved by a factor {comparison.factor:.3g} under K -> 2K")
    return comparison
