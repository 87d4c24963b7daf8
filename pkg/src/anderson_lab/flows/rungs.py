"""Per-rung tasks of an eps ladder and their worker pool.

Every task is a top-level function of (RunConfig, eps) so it can be shipped to a process.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence, TypeVar, Union

from ..models.run import RunConfig
from ..noise.enhance import EnhancedNoise2D, EnhancedNoise3D, enhance_2d, enhance_3d
from ..noise.mollifiers import get_mollifier
from ..operators.anderson2d import (
    OperatorBundle2D,
    domain_samples,
    g_deviation,
    lower_bound_check,
    shift_and_bundle,
)
from ..operators.anderson3d import (
    OperatorBundle3D,
    domain_samples_3d,
    exp_minus_2w_sup,
    g_deviation_3d,
    h1_flat_bound_check,
    shift_and_bundle_3d,
)
from ..operators.bundle import OperatorBundle, grad_norm_sq
from ..operators.diagnostics import bound_constant, common_shift
from ..spectral.lattice import FourierField, l2_norm

logger = logging.getLogger(__name__)

Noise = Union[EnhancedNoise2D, EnhancedNoise3D]
T = TypeVar("T")


def noise_regularity(config: RunConfig) -> float:
    """Hoelder exponent of xi_eps: alpha in 2-d, alpha - 2 in 3-d."""
    return config.alpha if config.torus.dim == 2 else config.alpha - 2.0


def noise_task(config: RunConfig, eps: float) -> Noise:
    """Enhanced noise of the shared realization at scale eps."""
    m = get_mollifier(config.noise.mollifier)
    section = config.noise
    if config.torus.dim == 2:
        return enhance_2d(
            section.seed,
            eps,
            m,
            config.torus,
            section.symbol_scale,
            config.alpha,
            section.zero_noise,
        )
    return enhance_3d(
        section.seed,
        eps,
        m,
        config.torus,
        section.c2_variant,
        section.symbol_scale,
        config.alpha,
        section.zero_noise,
    )


def build_bundle(config: RunConfig, noise: Noise) -> OperatorBundle:
    """Shifted operator of one rung."""
    op = config.operator
    args = (
        op.margin,
        op.N,
        op.target_contraction,
        op.calibration_samples,
        config.noise.seed,
        op.power_iterations,
        op.probe_count,
    )
    if isinstance(noise, EnhancedNoise2D):
        return shift_and_bundle(noise, *args)
    return shift_and_bundle_3d(noise, *args)


def bundle_task(config: RunConfig, eps: float) -> OperatorBundle:
    """Noise and shifted operator of one rung."""
    return build_bundle(config, noise_task(config, eps))


def map_rungs(
    task: Callable[[RunConfig, float], T],
    config: RunConfig,
    eps_list: Sequence[float],
    workers: int = 1,
) -> list[T]:
    """Run a rung task for every eps, in a process pool when workers > 1.

    Results keep the order of eps_list.
    """
    if workers <= 1 or len(eps_list) <= 1:
        return [task(config, eps) for eps in eps_list]
    logger.info(f"Running {len(eps_list)} rungs on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, config, eps) for eps in eps_list]
        return [f.result() for f in futures]


def with_common_shift(bundles: Sequence[OperatorBundle]) -> list[OperatorBundle]:
    """Every bundle shifted by the ladder's largest K_Xi."""
    shift = common_shift(bundles)
    return [replace(b, K_Xi=shift) for b in bundles]


@dataclass
class Holdout:
    """Domain samples disjoint from the calibration set and what the bound needs on them.

    Attributes:
        samples: Domain elements u
        slacks: Lower-bound slack of each sample under the calibrated C_Xi
        constant: Smallest C_Xi for which every slack would be non-negative
        g_deviations: Relative gap between the printed and the derived G per sample
    """

    samples: list[FourierField]
    slacks: list[float]
    constant: float
    g_deviations: list[float]


def holdout(bundle: OperatorBundle, count: int, seed: int) -> Holdout:
    """Evaluate the lower bound and the G variants on fresh domain samples."""
    matrix = bundle.matrix_eps
    if isinstance(bundle, OperatorBundle2D):
        pairs = domain_samples(bundle.noise, bundle.N, count, seed, sample_set=1)
        samples = [p.u for p in pairs]
        lhs = [0.5 * grad_norm_sq(p.u_sharp) for p in pairs]
        slacks = [lower_bound_check(bundle, p) for p in pairs]
        deviations = [g_deviation(p, bundle.noise) for p in pairs]
    else:
        assert isinstance(bundle, OperatorBundle3D)
        triples = domain_samples_3d(bundle.noise, bundle.N, count, seed, 1, bundle.lift)
        samples = [t.u for t in triples]
        sup = exp_minus_2w_sup(bundle.lift)
        lhs = [grad_norm_sq(t.u_flat) / sup for t in triples]
        slacks = [h1_flat_bound_check(bundle, t) for t in triples]
        deviations = [g_deviation_3d(t, bundle.noise) for t in triples]
    constant = bound_constant(
        lhs,
        [-matrix.quadratic_form(u) for u in samples],
        [l2_norm(u) ** 2 for u in samples],
    )
    return Holdout(samples, slacks, constant, deviations)
