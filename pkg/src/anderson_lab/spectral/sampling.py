"""Seeded Gaussian fields on the lattice.

Draws are taken shell by shell (|k|_inf = 0, 1, 2, ...) and lexicographically inside
a shell, one complex normal per pair {k, -k}. A realization at cutoff K is therefore
the restriction of the realization at any larger cutoff with the same generator state.
"""

import math
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from ..models.torus import TorusSpec
from .lattice import ComplexArray, FourierField, k_norm, wavevectors


@lru_cache(maxsize=32)
def half_lattice_order(spec: TorusSpec) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
    """Flat indices of the representatives k of pairs {k, -k} in draw order, and of -k.

    The representative is the member whose first nonzero component is positive.
    """
    ks = [k.ravel() for k in wavevectors(spec)]
    shell = np.max(np.abs(np.stack(ks)), axis=0)
    first_nonzero = np.zeros_like(ks[0])
    for k in reversed(ks):
        first_nonzero = np.where(k != 0, k, first_nonzero)
    positive = first_nonzero > 0
    order = np.lexsort((*reversed(ks), shell))
    reps = order[positive[order]]
    # flat index of -k is the mirror index of k
    mirrors = spec.n_modes - 1 - reps
    reps.setflags(write=False)
    mirrors.setflags(write=False)
    return reps, mirrors


def hermitian_gaussian(
    spec: TorusSpec, rng: np.random.Generator, real_zero_mode: bool = True
) -> ComplexArray:
    """Standard complex Gaussian coefficients with c(-k) = conj c(k).

    Every c(k), k != 0, has E|c(k)|^2 = 1. The zero mode is a real standard normal
    drawn first when real_zero_mode is set, and 0 otherwise.
    """
    coeffs = np.zeros(spec.n_modes, dtype=np.complex128)
    zero = float(rng.standard_normal()) if real_zero_mode else 0.0
    reps, mirrors = half_lattice_order(spec)
    draws = rng.standard_normal((len(reps), 2)) / math.sqrt(2.0)
    values = draws[:, 0] + 1j * draws[:, 1]
    coeffs[reps] = values
    coeffs[mirrors] = np.conj(values)
    coeffs[spec.n_modes // 2] = zero
    return coeffs.reshape(spec.shape)


def rough_field(
    spec: TorusSpec,
    s: float,
    rng: np.random.Generator,
    sigma: float = 1.0,
    zero_mean: bool = False,
) -> FourierField:
    """Random real field with coefficients sigma g_k / (1+|k|)^{s + d/2}.

    Samples sit at the edge of H^s: every H^{s'} norm with s' < s stays bounded as K grows.
    """
    g = hermitian_gaussian(spec, rng, real_zero_mode=not zero_mean)
    weight = sigma / (1.0 + k_norm(spec)) ** (s + spec.dim / 2.0)
    return FourierField(spec, g * weight, reality=True, zero_mode_excluded=zero_mean)


def band_limited_field(
    spec: TorusSpec, rng: np.random.Generator, cutoff: int, reality: bool = True
) -> FourierField:
    """Random field with independent Gaussian coefficients on |k|_inf <= cutoff."""
    shell = np.max(np.abs(np.stack(wavevectors(spec))), axis=0)
    if reality:
        coeffs = hermitian_gaussian(spec, rng)
    else:
        coeffs = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    coeffs = np.where(shell <= cutoff, coeffs, 0.0)
    return FourierField(spec, coeffs, reality=reality)
