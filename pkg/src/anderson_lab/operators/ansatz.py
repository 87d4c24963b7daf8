"""Fixed-point machinery of the paracontrolled ansatz u = T_N(u) + u_sharp.

T_N is the cut-off map of either dimension, e.g. f -> Delta_{>N}(f < X + B(f)) in 2-d.
It is linear, so Gamma = (1 - T_N)^{-1} is computed by Picard iteration once the
measured norm of T_N is below one.
"""

import logging
from typing import Callable

import numpy as np

from ..errors import ConvergenceError, ResolutionError
from ..models.torus import TorusSpec
from ..spectral.dyadic import max_cutoff_level
from ..spectral.lattice import FourierField, l2_norm
from ..spectral.sampling import rough_field

logger = logging.getLogger(__name__)

AnsatzMap = Callable[[FourierField], FourierField]

FIXED_POINT_TOL = 1e-10
FIXED_POINT_MAX_ITER = 200
STAGNATION = 1e-8


def estimate_map_norm(
    apply_map: AnsatzMap,
    spec: TorusSpec,
    iterations: int = 100,
    probes: int = 4,
    seed: int = 0,
) -> float:
    """L^2 norm estimate of a linear map: max of power-iteration and random-probe ratios.

    Power iteration stops after `iterations` steps or once successive ratios agree to
    1e-8 relative.
    """
    rng = np.random.default_rng([seed, 7])
    v = rough_field(spec, 0.0, rng)
    v = v / l2_norm(v)
    ratios: list[float] = []
    previous = None
    for _ in range(iterations):
        w = apply_map(v)
        ratio = l2_norm(w)
        ratios.append(ratio)
        if ratio == 0.0:
            break
        if previous is not None and abs(ratio - previous) <= STAGNATION * ratio:
            break
        previous = ratio
        v = w / ratio
    for _ in range(probes):
        p = rough_field(spec, 0.0, rng)
        ratios.append(l2_norm(apply_map(p)) / l2_norm(p))
    return max(ratios)


def find_cutoff(
    map_at: Callable[[int], AnsatzMap],
    spec: TorusSpec,
    target: float = 0.5,
    iterations: int = 100,
    probes: int = 4,
    seed: int = 0,
) -> tuple[int, float]:
    """Smallest N with measured ||T_N|| <= target, and that norm.

    Raises:
        ResolutionError: If no N with 2^N <= K sqrt(d) reaches the target
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target contraction must lie in (0, 1), got {target}")
    top = max_cutoff_level(spec)
    estimate = float("inf")
    for N in range(top + 1):
        estimate = estimate_map_norm(map_at(N), spec, iterations, probes, seed)
        logger.debug(f"N={N}: ||T_N|| ~ {estimate:.4g}")
        if estimate <= target:
            return N, estimate
    raise ResolutionError(
        f"Resolution too small for this realization: ||T_N|| ~ {estimate:.3g} > {target} "
        f"at the last level N={top} (K={spec.K})"
    )


def fixed_point(
    apply_map: AnsatzMap,
    u_sharp: FourierField,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
) -> tuple[FourierField, int]:
    """Solve g = T(g) + u_sharp from g_0 = u_sharp.

    Returns:
        (g, iterations)

    Raises:
        ConvergenceError: If the update does not fall below tol ||u_sharp|| in max_iter steps
    """
    scale = l2_norm(u_sharp)
    g = u_sharp
    step = float("inf")
    for iteration in range(1, max_iter + 1):
        g_next = apply_map(g) + u_sharp
        step = l2_norm(g_next - g)
        g = g_next
        if step <= tol * scale:
            return g, iteration
    raise ConvergenceError(
        f"Gamma fixed point did not converge in {max_iter} iterations "
        f"(last update {step:.3e}); the ansatz map is not a contraction at this N",
        iterations=max_iter,
        residual=step,
    )
