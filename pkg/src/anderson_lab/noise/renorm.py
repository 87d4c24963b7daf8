"""Renormalization constants as finite lattice sums.

Every sum runs over |k|_inf <= K. The symbol scale s replaces |k|^2 by s|k|^2 in the
denominators: s = 4 pi^2 makes c_eps the exact mean of xi_eps o (1-Lap)^{-1} xi_eps and
c1_eps the exact mean of |grad X_eps|^2; s = 1 gives the literal integer-lattice sums.
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.signal
from numpy.typing import NDArray

from ..config import settings
from ..errors import DomainViolationError, ResolutionError
from ..models.noise import C2Variant
from ..models.torus import TorusSpec
from ..spectral.lattice import k_squared
from .mollifiers import Mollifier

logger = logging.getLogger(__name__)

DEFAULT_SYMBOL_SCALE = 4.0 * math.pi**2


def _scale(symbol_scale: Optional[float]) -> float:
    s = DEFAULT_SYMBOL_SCALE if symbol_scale is None else float(symbol_scale)
    if s <= 0:
        raise DomainViolationError(f"symbol_scale must be positive, got {s}")
    return s


def _check_eps(eps: float) -> None:
    if eps <= 0:
        raise DomainViolationError(f"eps must be positive, got {eps}")


@lru_cache(maxsize=32)
def shell_counts(K: int, dim: int) -> NDArray[np.int64]:
    """Number of lattice points with |k|^2 = n, |k|_inf <= K, indexed by n."""
    axis = np.arange(-K, K + 1)
    counts_1d = np.bincount(axis**2)
    counts = counts_1d
    for _ in range(dim - 1):
        counts = np.convolve(counts, counts_1d)
    out = counts.astype(np.int64)
    out.setflags(write=False)
    return out


def _shell_weights(
    eps: float, m: Mollifier, K: int, dim: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    counts = shell_counts(K, dim)
    n = np.arange(counts.size, dtype=np.float64)
    return counts * m(eps * np.sqrt(n)) ** 2, n


def renorm_const_2d(
    eps: float, m: Mollifier, K: int, symbol_scale: Optional[float] = None
) -> float:
    """c_eps = sum_k |m(eps k)|^2 / (1 + s|k|^2)."""
    _check_eps(eps)
    s = _scale(symbol_scale)
    weights, n = _shell_weights(eps, m, K, 2)
    return float(np.sum(weights / (1.0 + s * n)))


def renorm_c1(
    eps: float, m: Mollifier, K: int, dim: int = 3, symbol_scale: Optional[float] = None
) -> float:
    """c1_eps = sum_{k != 0} |m(eps k)|^2 / (s|k|^2)."""
    _check_eps(eps)
    s = _scale(symbol_scale)
    weights, n = _shell_weights(eps, m, K, dim)
    return float(np.sum(weights[1:] / (s * n[1:])))


def _lattice_vectors(K: int, dim: int) -> NDArray[np.int64]:
    axis = np.arange(-K, K + 1)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _c2_printed(eps: float, m: Mollifier, K: int, dim: int, s: float) -> float:
    pts = _lattice_vectors(K, dim)
    ksq = np.sum(pts**2, axis=1)
    w = m(eps * np.sqrt(ksq)) ** 2
    keep = (ksq > 0) & (w > 0)
    pts, ksq, w = pts[keep], ksq[keep].astype(np.float64), w[keep]
    n = len(pts)
    if n * n > settings.max_c2_pairs:
        raise ResolutionError(
            f"Direct c2 sum needs {n * n:,} pairs (limit {settings.max_c2_pairs:,}); "
            "use the signed or wick variant"
        )
    total = 0.0
    rows = max(1, 2_000_000 // max(n, 1))
    for start in range(0, n, rows):
        p1 = pts[start : start + rows]
        dots = (p1 @ pts.T).astype(np.float64)
        d2 = ksq[start : start + rows, None] + ksq[None, :] - 2.0 * dots
        denom = d2 * ksq[start : start + rows, None] ** 2 * ksq[None, :]
        w12 = w[start : start + rows, None] * w[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(d2 > 0, np.abs(dots) * w12 / denom, 0.0)
        total += float(terms.sum())
    return total / s**3


def _lattice_fields(
    eps: float, m: Mollifier, K: int, dim: int
) -> tuple[list[NDArray[np.float64]], NDArray[np.float64], NDArray[np.float64]]:
    """Wavevector components, |k|^2 with the zero mode set to 1, and weights |m(eps k)|^2."""
    axis = np.arange(-K, K + 1, dtype=np.float64)
    ks = np.meshgrid(*([axis] * dim), indexing="ij")
    ksq = np.asarray(sum(k**2 for k in ks))
    w = np.where(ksq > 0, m(eps * np.sqrt(ksq)) ** 2, 0.0)
    return ks, np.where(ksq > 0, ksq, 1.0), w


def _c2_signed(eps: float, m: Mollifier, K: int, dim: int, s: float) -> float:
    ks, ksq, w = _lattice_fields(eps, m, K, dim)
    axis = np.arange(-2 * K, 2 * K + 1, dtype=np.float64)
    qs = np.meshgrid(*([axis] * dim), indexing="ij")
    qsq = sum(q**2 for q in qs)
    with np.errstate(divide="ignore"):
        green = np.where(qsq > 0, 1.0 / qsq, 0.0)
    core = tuple(slice(2 * K, 4 * K + 1) for _ in range(dim))
    total = 0.0
    for k in ks:
        a1 = k * w / ksq**2
        a2 = k * w / ksq
        conv = scipy.signal.fftconvolve(a2, green, mode="full")[core]
        total += float(np.sum(a1 * conv))
    return total / s**3


def _c2_wick(eps: float, m: Mollifier, K: int, dim: int, s: float) -> float:
    ks, ksq, w = _lattice_fields(eps, m, K, dim)
    base = w / (s * ksq**2)
    core = tuple(slice(K, 3 * K + 1) for _ in range(dim))
    pair_sum = np.zeros((2 * K + 1,) * dim)
    for a in range(dim):
        for b in range(a, dim):
            f_ab = ks[a] * ks[b] * base
            corr = scipy.signal.fftconvolve(f_ab, f_ab[(slice(None, None, -1),) * dim])[core]
            pair_sum += corr if a == b else 2.0 * corr
    qsq = np.asarray(sum(k**2 for k in ks))
    weight = s * qsq / (1.0 + s * qsq) ** 2
    return float(np.sum(weight * 2.0 * pair_sum))


def renorm_c2(
    eps: float,
    m: Mollifier,
    K: int,
    variant: C2Variant = C2Variant.PRINTED,
    dim: int = 3,
    symbol_scale: Optional[float] = None,
) -> float:
    """Second 3-d constant.

    Variants:
        printed: sum_{k1 != k2; k1, k2 != 0} |m1|^2 |m2|^2 |k1.k2| / (s^3 |k1-k2|^2 |k1|^4 |k2|^2)
        signed: the same sum with the signed inner product k1.k2
        wick: exact mean of |grad X1_eps|^2 at this cutoff

    Raises:
        ResolutionError: If the direct printed sum exceeds settings.max_c2_pairs
    """
    _check_eps(eps)
    s = _scale(symbol_scale)
    variant = C2Variant(variant)
    if variant is C2Variant.PRINTED:
        return _c2_printed(eps, m, K, dim, s)
    if variant is C2Variant.SIGNED:
        return _c2_signed(eps, m, K, dim, s)
    return _c2_wick(eps, m, K, dim, s)


def renorm_const_3d(
    eps: float,
    m: Mollifier,
    K: int,
    variant: C2Variant = C2Variant.PRINTED,
    symbol_scale: Optional[float] = None,
) -> tuple[float, float]:
    """(c1_eps, c2_eps) of the 3-d construction."""
    c1 = renorm_c1(eps, m, K, 3, symbol_scale)
    c2 = renorm_c2(eps, m, K, variant, 3, symbol_scale)
    logger.debug(f"3-d constants at eps={eps:g}, K={K}: c1={c1:.6g}, c2={c2:.6g} ({variant})")
    return c1, c2


def renorm_rates(
    eps_ladder: Sequence[float],
    m: Mollifier,
    dim: int,
    symbol_scale: Optional[float] = None,
) -> list[float]:
    """Growth of the divergent constant along the ladder, coarse to fine.

    2-d: (c_eps' - c_eps) / log(eps / eps') between consecutive rungs, tending to
    2 pi / s. 3-d: eps c1_eps on every rung. The sums run at K = ceil(support / min eps),
    so no rung is cut by the lattice.
    """
    ladder = sorted(eps_ladder, reverse=True)
    for eps in ladder:
        _check_eps(eps)
    K = math.ceil(m.support / ladder[-1])
    if dim == 2:
        c = [renorm_const_2d(eps, m, K, symbol_scale) for eps in ladder]
        return [
            (fine - coarse) / math.log(e0 / e1)
            for coarse, fine, e0, e1 in zip(c, c[1:], ladder, ladder[1:])
        ]
    return [eps * renorm_c1(eps, m, K, dim, symbol_scale) for eps in ladder]


def direct_lattice_sum(
    spec: TorusSpec, eps: float, m: Mollifier, symbol_scale: Optional[float] = None
) -> float:
    """c_eps (2-d) or c1_eps (3-d) summed mode by mode over the lattice of spec."""
    _check_eps(eps)
    s = _scale(symbol_scale)
    ksq = k_squared(spec).astype(np.float64)
    weights = m(eps * np.sqrt(ksq)) ** 2
    if spec.dim == 2:
        return float(np.sum(weights / (1.0 + s * ksq)))
    nonzero = ksq > 0
    return float(np.sum(weights[nonzero] / (s * ksq[nonzero])))
