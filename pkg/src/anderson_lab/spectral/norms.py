"""Lebesgue, Besov, Sobolev and Hoelder norms of lattice fields."""

import itertools
import math
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from ..errors import DomainViolationError
from ..models.torus import BlockNorm, NormReport
from .dyadic import CHI_RADIUS, RHO_INNER, RHO_OUTER, DyadicPartition, lp_block
from .lattice import FourierField, k_norm, k_squared, l2_norm


def lp_norm(f: FourierField, p: float, n: Optional[int] = None) -> float:
    """L^p norm on the unit torus.

    p = 2 is exact from the coefficients (Parseval); other p use grid quadrature.
    """
    if p < 1:
        raise DomainViolationError(f"L^p needs p >= 1, got {p}")
    if p == 2:
        return l2_norm(f)
    return _grid_lp(np.abs(f.grid(n)), p)


def besov_norm(
    f: FourierField,
    alpha: float,
    p: float,
    q: float,
    part: DyadicPartition,
) -> NormReport:
    """Besov norm (sum_j 2^{j q alpha} ||Delta_j f||_p^q)^{1/q} with its block breakdown.

    Args:
        f: Field to measure
        alpha: Regularity index
        p: Integrability of each block
        q: Summability over blocks (math.inf for the sup)
        part: Dyadic partition on f's lattice

    Returns:
        NormReport with the value and one BlockNorm per block
    """
    if p < 1 or q < 1:
        raise DomainViolationError(f"Besov norm needs p, q >= 1 (got p={p}, q={q})")
    per_block = [
        BlockNorm(j=j, value=lp_norm(lp_block(f, j, part), p)) for j in part.blocks
    ]
    report = NormReport(alpha=alpha, p=p, q=q, value=0.0, per_block=per_block)
    report.value = report.recompute()
    return report


def holder_norm(f: FourierField, alpha: float, part: DyadicPartition) -> float:
    """Hoelder-Besov norm of C^alpha = B^alpha_{inf,inf}."""
    return besov_norm(f, alpha, math.inf, math.inf, part).value


def sobolev_norm(f: FourierField, alpha: float) -> float:
    """H^alpha norm (sum_k (1+|k|^2)^alpha |f(k)|^2)^{1/2}."""
    weight = (1.0 + k_squared(f.spec).astype(np.float64)) ** alpha
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2)))


def block_supported(f: FourierField, j: int, atol: float = 1e-14) -> bool:
    """Whether every coefficient of f outside the support of block j vanishes."""
    inner, outer = (0.0, CHI_RADIUS) if j == -1 else (RHO_INNER * 2.0**j, RHO_OUTER * 2.0**j)
    r = k_norm(f.spec)
    outside = (r < inner) | (r > outer)
    scale = max(float(np.abs(f.coeffs).max()), 1.0)
    return bool(np.all(np.abs(f.coeffs[outside]) <= atol * scale))


def _grid_lp(values: NDArray[Any], q: float) -> float:
    if math.isinf(q):
        return float(values.max())
    return float(np.mean(values**q) ** (1.0 / q))


def derivative_magnitude(f: FourierField, k_deriv: int, n: Optional[int] = None) -> NDArray[Any]:
    """Grid values of |D^k f| = (sum over ordered mu of |d^mu f|^2)^{1/2}."""
    square = np.zeros((f.spec.grid_n if n is None else n,) * f.spec.dim)
    for mu in itertools.product(range(f.spec.dim), repeat=k_deriv):
        g = f
        for axis in mu:
            g = g.partial(axis)
        square = square + np.abs(g.grid(n)) ** 2
    return np.sqrt(square)


def bernstein_check(f: FourierField, j: int, k_deriv: int, p: float, q: float) -> float:
    """Bernstein ratio ||D^k f||_q / (lam^{k + d(1/p - 1/q)} ||f||_p), lam = 2^j.

    D^k f is the full k-th derivative tensor, so one mode k gives (2 pi |k|)^k ||f||.

    Raises:
        DomainViolationError: If f is not supported in block j or p > q
    """
    if not block_supported(f, j):
        raise DomainViolationError(f"Field is not supported in block {j}")
    if p > q:
        raise DomainViolationError(f"Bernstein needs p <= q (got p={p}, q={q})")
    base = lp_norm(f, p)
    if base == 0.0:
        return 0.0
    lam = 2.0**j
    d = f.spec.dim
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    top = _grid_lp(derivative_magnitude(f, k_deriv), q)
    return top / (lam ** (k_deriv + d * (inv_p - inv_q)) * base)
