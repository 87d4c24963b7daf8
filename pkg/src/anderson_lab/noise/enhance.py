"""Enhanced noise: the regularized noise together with its renormalized products."""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ..errors import OverflowFieldError, SpecMismatchError
from ..models.noise import C2Variant, NoiseRecord
from ..models.torus import TorusSpec
from ..paracalc.products import resonant, vec_resonant
from ..spectral.dyadic import DyadicPartition
from ..spectral.lattice import FourierField, VectorField, dot, product_grid_size
from ..spectral.norms import holder_norm
from .mollifiers import BUMP, Mollifier
from .renorm import DEFAULT_SYMBOL_SCALE, renorm_const_2d, renorm_const_3d
from .white import lattice_truncated, mollify, sample_white_noise

logger = logging.getLogger(__name__)

# exp overflows float64 just above 709
EXP_LIMIT = 700.0


@dataclass(frozen=True, eq=False)
class EnhancedNoise2D:
    """The 2-d pair (xi_eps, Xi2) with Xi2 = xi_eps o (1-Lap)^{-1} xi_eps - c_eps.

    Attributes:
        X: (1-Lap)^{-1} xi_eps
        Xi2: Renormalized resonant product
        c_eps: Constant subtracted in Xi2
    """

    spec: TorusSpec
    eps: float
    seed: int
    mollifier: str
    xi: FourierField
    X: FourierField
    Xi2: FourierField
    c_eps: float
    symbol_scale: float = DEFAULT_SYMBOL_SCALE
    truncated: bool = False
    norms: dict[str, float] = field(default_factory=dict)

    @classmethod
    def null(cls, spec: TorusSpec) -> "EnhancedNoise2D":
        """Vanishing noise with no renormalization: the operator reduces to the Laplacian."""
        zero = FourierField.zeros(spec)
        return cls(spec, math.inf, -1, "none", zero, zero, zero, 0.0)

    @property
    def is_null(self) -> bool:
        return self.mollifier == "none"

    def record(self) -> NoiseRecord:
        return NoiseRecord(
            dim=2,
            K=self.spec.K,
            seed=self.seed,
            eps=self.eps if math.isfinite(self.eps) else 1.0,
            mollifier=self.mollifier,
            symbol_scale=self.symbol_scale,
            c_eps=self.c_eps,
            truncated=self.truncated,
            norms=self.norms,
        )


def enhance_2d_from_field(
    xi_raw: FourierField,
    eps: float,
    m: Mollifier = BUMP,
    seed: int = -1,
    symbol_scale: Optional[float] = None,
    alpha: Optional[float] = None,
) -> EnhancedNoise2D:
    """Enhance a given (unmollified) noise field in 2-d."""
    spec = xi_raw.spec
    if spec.dim != 2:
        raise SpecMismatchError(f"enhance_2d needs a 2-d lattice, got dim={spec.dim}")
    s = DEFAULT_SYMBOL_SCALE if symbol_scale is None else symbol_scale
    xi = mollify(xi_raw, eps, m)
    X = xi.bessel_inv()
    c_eps = renorm_const_2d(eps, m, spec.K, s)
    Xi2 = resonant(xi, X).add_constant(-c_eps)
    norms: dict[str, float] = {}
    if alpha is not None:
        part = DyadicPartition.for_spec(spec)
        norms = {
            "xi": holder_norm(xi, alpha, part),
            "Xi2": holder_norm(Xi2, 2.0 * alpha + 2.0, part),
        }
    logger.debug(f"2-d noise seed={seed} eps={eps:g}: c_eps={c_eps:.6g}")
    return EnhancedNoise2D(
        spec=spec,
        eps=eps,
        seed=seed,
        mollifier=m.id,
        xi=xi,
        X=X,
        Xi2=Xi2,
        c_eps=c_eps,
        symbol_scale=s,
        truncated=lattice_truncated(eps, m, spec.K),
        norms=norms,
    )


def enhance_2d(
    seed: int,
    eps: float,
    m: Mollifier,
    spec: TorusSpec,
    symbol_scale: Optional[float] = None,
    alpha: Optional[float] = None,
    zero_noise: bool = False,
) -> EnhancedNoise2D:
    """Sample white noise with `seed` and build its 2-d enhancement at scale eps."""
    xi_raw = FourierField.zeros(spec) if zero_noise else sample_white_noise(seed, spec)
    return enhance_2d_from_field(xi_raw, eps, m, seed, symbol_scale, alpha)


@dataclass(frozen=True, eq=False)
class EnhancedNoise3D:
    """The 3-d tree fields and the derived W, W~, Z of the exponential transform.

    X = (-Lap)^{-1} xi_eps with the zero mode dropped, L = 1 - Lap, and
        X1 = L^{-1}(|grad X|^2 - c1)
        X2 = 2 L^{-1}(grad X . grad X1)
        X3 = L^{-1}(grad X . grad X2)
        X4 = L^{-1}(|grad X1|^2 - c2)
        W = X + X1 + X2,  W~ = L^{-1} grad W
        Z = L^{-1}(|grad X2|^2 + 2 grad X1 . grad X2 + X1 + X2) + X4 + 2 X3
    so that L Z = Lap W + |grad W|^2 + xi_eps - c1 - c2.
    """

    spec: TorusSpec
    eps: float
    seed: int
    mollifier: str
    xi: FourierField
    X: FourierField
    X1: FourierField
    X2: FourierField
    X3: FourierField
    X4: FourierField
    gradX_res_gradX3: FourierField
    c1: float
    c2: float
    c2_variant: C2Variant = C2Variant.PRINTED
    symbol_scale: float = DEFAULT_SYMBOL_SCALE
    truncated: bool = False
    norms: dict[str, float] = field(default_factory=dict)

    @classmethod
    def null(cls, spec: TorusSpec) -> "EnhancedNoise3D":
        zero = FourierField.zeros(spec)
        return cls(spec, math.inf, -1, "none", zero, zero, zero, zero, zero, zero, zero, 0.0, 0.0)

    @property
    def is_null(self) -> bool:
        return self.mollifier == "none"

    @property
    def c_total(self) -> float:
        return self.c1 + self.c2

    @cached_property
    def W(self) -> FourierField:
        return self.X + self.X1 + self.X2

    @cached_property
    def LWtilde(self) -> VectorField:
        """(1-Lap) W~ = grad W."""
        return self.W.grad()

    @cached_property
    def Wtilde(self) -> VectorField:
        return tuple(g.bessel_inv() for g in self.LWtilde)

    @cached_property
    def Z(self) -> FourierField:
        g1, g2 = self.X1.grad(), self.X2.grad()
        inner_terms = dot(g2, g2) + 2.0 * dot(g1, g2) + self.X1 + self.X2
        return inner_terms.bessel_inv() + self.X4 + 2.0 * self.X3

    @cached_property
    def LZ(self) -> FourierField:
        return self.Z.bessel()

    @cached_property
    def R1(self) -> VectorField:
        """(1-Lap) W~_a o Z."""
        return tuple(resonant(lw, self.Z) for lw in self.LWtilde)

    @cached_property
    def R2(self) -> FourierField:
        """sum_a (1-Lap) W~_a o d_a Z."""
        return vec_resonant(self.LWtilde, self.Z.grad())

    @cached_property
    def R3(self) -> VectorField:
        """sum_a (1-Lap) W~_a o d_a W~_b, one entry per b."""
        return tuple(vec_resonant(self.LWtilde, wt.grad()) for wt in self.Wtilde)

    @cached_property
    def R4(self) -> FourierField:
        """(1-Lap) Z o Z."""
        return resonant(self.LZ, self.Z)

    @cached_property
    def R5(self) -> VectorField:
        """(1-Lap) Z o W~_b."""
        return tuple(resonant(self.LZ, wt) for wt in self.Wtilde)

    def record(self) -> NoiseRecord:
        return NoiseRecord(
            dim=3,
            K=self.spec.K,
            seed=self.seed,
            eps=self.eps if math.isfinite(self.eps) else 1.0,
            mollifier=self.mollifier,
            symbol_scale=self.symbol_scale,
            c1_eps=self.c1,
            c2_eps=self.c2,
            c2_variant=self.c2_variant,
            truncated=self.truncated,
            norms=self.norms,
        )


def tree_norms(noise: EnhancedNoise3D, alpha: float) -> dict[str, float]:
    """Hoelder norms of the tree fields in the regularities of the 3-d noise space."""
    part = DyadicPartition.for_spec(noise.spec)
    return {
        "X": holder_norm(noise.X, alpha, part),
        "X1": holder_norm(noise.X1, 2.0 * alpha, part),
        "X2": holder_norm(noise.X2, alpha + 1.0, part),
        "X3": holder_norm(noise.X3, alpha + 1.0, part),
        "X4": holder_norm(noise.X4, 4.0 * alpha, part),
        "gradX_res_gradX3": holder_norm(noise.gradX_res_gradX3, 2.0 * alpha - 1.0, part),
    }


def enhance_3d_from_field(
    xi_raw: FourierField,
    eps: float,
    m: Mollifier = BUMP,
    seed: int = -1,
    variant: C2Variant = C2Variant.PRINTED,
    symbol_scale: Optional[float] = None,
    alpha: Optional[float] = None,
) -> EnhancedNoise3D:
    """Enhance a given (unmollified) noise field in 3-d.

    Tree fields are built in dependency order X, X1, X2, (X3, X4, grad X o grad X3).
    """
    spec = xi_raw.spec
    if spec.dim != 3:
        raise SpecMismatchError(f"enhance_3d needs a 3-d lattice, got dim={spec.dim}")
    s = DEFAULT_SYMBOL_SCALE if symbol_scale is None else symbol_scale
    c1, c2 = renorm_const_3d(eps, m, spec.K, variant, s)
    xi = mollify(xi_raw, eps, m)
    X = xi.inv_laplacian()
    gX = X.grad()
    X1 = dot(gX, gX).add_constant(-c1).bessel_inv()
    gX1 = X1.grad()
    X2 = (2.0 * dot(gX, gX1)).bessel_inv()
    X3 = dot(gX, X2.grad()).bessel_inv()
    X4 = dot(gX1, gX1).add_constant(-c2).bessel_inv()
    gradX_res_gradX3 = vec_resonant(gX, X3.grad())
    noise = EnhancedNoise3D(
        spec=spec,
        eps=eps,
        seed=seed,
        mollifier=m.id,
        xi=xi,
        X=X,
        X1=X1,
        X2=X2,
        X3=X3,
        X4=X4,
        gradX_res_gradX3=gradX_res_gradX3,
        c1=c1,
        c2=c2,
        c2_variant=C2Variant(variant),
        symbol_scale=s,
        truncated=lattice_truncated(eps, m, spec.K),
    )
    if alpha is not None:
        noise.norms.update(tree_norms(noise, alpha))
    return noise


def enhance_3d(
    seed: int,
    eps: float,
    m: Mollifier,
    spec: TorusSpec,
    variant: C2Variant = C2Variant.PRINTED,
    symbol_scale: Optional[float] = None,
    alpha: Optional[float] = None,
    zero_noise: bool = False,
) -> EnhancedNoise3D:
    """Sample white noise with `seed` and build its 3-d enhancement at scale eps."""
    if spec.dim != 3:
        raise SpecMismatchError(f"enhance_3d needs a 3-d lattice, got dim={spec.dim}")
    xi_raw = FourierField.zeros(spec) if zero_noise else sample_white_noise(seed, spec)
    return enhance_3d_from_field(xi_raw, eps, m, seed, variant, symbol_scale, alpha)


@dataclass(frozen=True, eq=False)
class ExpLift:
    """Exponentials of the 3-d noise fields on the quadratic product grid.

    `grids` holds the pointwise exponentials; `fields` their projections on the lattice.
    """

    spec: TorusSpec
    n: int
    grids: dict[str, NDArray[np.float64]]

    @cached_property
    def fields(self) -> dict[str, FourierField]:
        return {
            name: FourierField.from_grid(self.spec, values, True)
            for name, values in self.grids.items()
        }

    def multiply(self, name: str, f: FourierField) -> FourierField:
        """Projection of the grid product exp(.) f, e.g. multiply("W", u_flat) = e^W u_flat."""
        values = self.grids[name] * f.grid(self.n)
        return FourierField.from_grid(self.spec, values, f.reality)

    def identity_defect(self) -> float:
        """max |e^{-W} e^{W} - 1| on the grid."""
        return float(np.max(np.abs(self.grids["-W"] * self.grids["W"] - 1.0)))


def exp_lift(noise: EnhancedNoise3D) -> ExpLift:
    """Grid exponentials e^X, e^{X1}, e^{X2}, e^W, e^{-W}, e^{2W}.

    Raises:
        OverflowFieldError: If an exponent would overflow
    """
    spec = noise.spec
    n = product_grid_size(spec, 2)
    exponents = {
        "X": noise.X.grid(n),
        "X1": noise.X1.grid(n),
        "X2": noise.X2.grid(n),
    }
    W = noise.W.grid(n)
    exponents.update({"W": W, "-W": -W, "2W": 2.0 * W, "-2W": -2.0 * W})
    peak = max(float(np.max(v)) for v in exponents.values())
    if peak > EXP_LIMIT:
        raise OverflowFieldError(f"Exponent reaches {peak:.4g}; e^W overflows for this realization")
    grids = {name: np.exp(values) for name, values in exponents.items()}
    return ExpLift(spec=spec, n=n, grids=grids)
