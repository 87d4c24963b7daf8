"""Radial mollifiers m with compact support in |x| < 1 and m(0) = 1."""

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray

from ..errors import ConfigError
from ..spectral.dyadic import smooth_step

RadialFn = Callable[[NDArray[np.float64]], NDArray[np.float64]]


def _bump(r: NDArray[np.float64]) -> NDArray[np.float64]:
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return out


def _cosine(r: NDArray[np.float64]) -> NDArray[np.float64]:
    taper = np.cos(0.5 * math.pi * smooth_step(r)) ** 2
    return np.where(r < 1.0, taper, 0.0)


@dataclass(frozen=True)
class Mollifier:
    """Smooth radial function evaluated at |x|.

    Attributes:
        id: Name recorded in run manifests
        profile: Function of the radius r = |x|
        support: m vanishes for r >= support
    """

    id: str
    profile: RadialFn
    support: float = 1.0

    def __call__(self, r: Any) -> NDArray[np.float64]:
        r = np.abs(np.asarray(r, dtype=np.float64))
        out = self.profile(np.atleast_1d(r)).reshape(r.shape)
        return np.asarray(out, dtype=np.float64)


BUMP = Mollifier("bump", _bump)
COSINE = Mollifier("cosine", _cosine)

MOLLIFIERS: dict[str, Mollifier] = {m.id: m for m in (BUMP, COSINE)}


def get_mollifier(name: str) -> Mollifier:
    """Look up a mollifier by id.

    Raises:
        ConfigError: If the id is unknown
    """
    try:
        return MOLLIFIERS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown mollifier '{name}' (available: {', '.join(sorted(MOLLIFIERS))})"
        ) from None
