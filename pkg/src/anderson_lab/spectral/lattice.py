"""Fields on the truncated Fourier lattice of the d-dimensional torus.

A field is stored by its coefficients c(k), |k|_inf <= K, with the convention
f(x) = sum_k c(k) exp(2 pi i k.x). Array index k + K holds c(k) along every axis,
so the C-order ravel of the coefficient array is the lexicographic k order.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
import scipy.fft
from numpy.typing import NDArray

from ..config import settings
from ..errors import SpecMismatchError
from ..models.torus import TorusSpec

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]
Scalar = Union[int, float, complex]


@lru_cache(maxsize=64)
def wavevectors(spec: TorusSpec) -> tuple[NDArray[np.int64], ...]:
    """Integer wavevector components k_a, each of shape spec.shape."""
    axis = np.arange(-spec.K, spec.K + 1)
    grids = np.meshgrid(*([axis] * spec.dim), indexing="ij")
    for g in grids:
        g.setflags(write=False)
    return tuple(grids)


@lru_cache(maxsize=64)
def k_squared(spec: TorusSpec) -> NDArray[np.int64]:
    """Squared euclidean norm |k|^2 of every lattice point."""
    ksq = sum(k.astype(np.int64) ** 2 for k in wavevectors(spec))
    out = np.asarray(ksq, dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def k_norm(spec: TorusSpec) -> RealArray:
    """Euclidean norm |k| of every lattice point."""
    out = np.sqrt(k_squared(spec).astype(np.float64))
    out.setflags(write=False)
    return out


def laplacian_symbol(spec: TorusSpec) -> RealArray:
    """Fourier symbol of the Laplacian, -4 pi^2 |k|^2."""
    return -4.0 * math.pi**2 * k_squared(spec).astype(np.float64)


def bessel_symbol(spec: TorusSpec) -> RealArray:
    """Fourier symbol of (1 - Laplacian), 1 + 4 pi^2 |k|^2."""
    return 1.0 + 4.0 * math.pi**2 * k_squared(spec).astype(np.float64)


def center_index(spec: TorusSpec) -> tuple[int, ...]:
    """Array index of the zero mode."""
    return (spec.K,) * spec.dim


def mode_index(spec: TorusSpec, k: Sequence[int]) -> tuple[int, ...]:
    """Array index of lattice point k."""
    if len(k) != spec.dim:
        raise SpecMismatchError(f"Wavevector {tuple(k)} does not match dim={spec.dim}")
    if max(abs(int(c)) for c in k) > spec.K:
        raise SpecMismatchError(f"Wavevector {tuple(k)} lies outside |k|_inf <= {spec.K}")
    return tuple(int(c) + spec.K for c in k)


def _lattice_slots(spec: TorusSpec, n: int) -> tuple[NDArray[np.intp], ...]:
    idx = np.arange(-spec.K, spec.K + 1) % n
    return np.ix_(*([idx] * spec.dim))


def product_grid_size(spec: TorusSpec, order: int) -> int:
    """Grid size on which a product of `order` band-K fields is alias free on |k|_inf <= K."""
    return max(spec.grid_n, (order + 1) * spec.K + 1)


def coeffs_to_grid(
    spec: TorusSpec, coeffs: ComplexArray, n: Optional[int] = None
) -> ComplexArray:
    """Evaluate a coefficient array at the n^d points x_j = j/n."""
    n = spec.grid_n if n is None else n
    if n < spec.side:
        raise SpecMismatchError(f"Grid of {n} points cannot hold |k|_inf <= {spec.K}")
    buf = np.zeros((n,) * spec.dim, dtype=np.complex128)
    buf[_lattice_slots(spec, n)] = coeffs
    out: ComplexArray = scipy.fft.ifftn(buf, workers=settings.fft_workers) * float(n) ** spec.dim
    return out


def grid_to_coeffs(spec: TorusSpec, values: NDArray[Any]) -> ComplexArray:
    """Project grid samples onto the lattice |k|_inf <= K."""
    values = np.asarray(values)
    n = values.shape[0]
    if values.ndim != spec.dim or any(s != n for s in values.shape) or n < spec.side:
        raise SpecMismatchError(
            f"Grid of shape {values.shape} does not match dim={spec.dim}, K={spec.K}"
        )
    spectrum = scipy.fft.fftn(values, workers=settings.fft_workers) / float(n) ** spec.dim
    out: ComplexArray = np.ascontiguousarray(spectrum[_lattice_slots(spec, n)])
    return out


@dataclass(frozen=True, eq=False)
class FourierField:
    """Band-limited field on the torus, stored by its Fourier coefficients.

    Attributes:
        spec: Lattice the coefficients live on
        coeffs: Complex coefficients, shape spec.shape, index k + K
        reality: Coefficients are hermitian (c(-k) = conj c(k)), so the field is real
        zero_mode_excluded: Coefficient c(0) is held at zero
    """

    spec: TorusSpec
    coeffs: ComplexArray
    reality: bool = False
    zero_mode_excluded: bool = False
    _grids: dict[Any, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != self.spec.shape:
            raise SpecMismatchError(
                f"Coefficient array {coeffs.shape} does not match lattice {self.spec.shape}"
            )
        if self.reality:
            coeffs = 0.5 * (coeffs + np.conj(np.flip(coeffs)))
        if self.zero_mode_excluded:
            coeffs[center_index(self.spec)] = 0.0
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    # Constructors

    @classmethod
    def zeros(cls, spec: TorusSpec, reality: bool = True) -> "FourierField":
        return cls(spec, np.zeros(spec.shape, dtype=np.complex128), reality=reality)

    @classmethod
    def constant(cls, spec: TorusSpec, value: Scalar) -> "FourierField":
        coeffs = np.zeros(spec.shape, dtype=np.complex128)
        coeffs[center_index(spec)] = value
        return cls(spec, coeffs, reality=complex(value).imag == 0)

    @classmethod
    def mode(cls, spec: TorusSpec, k: Sequence[int], amplitude: Scalar = 1.0) -> "FourierField":
        """The single exponential amplitude * exp(2 pi i k.x)."""
        coeffs = np.zeros(spec.shape, dtype=np.complex128)
        coeffs[mode_index(spec, k)] = amplitude
        return cls(spec, coeffs)

    @classmethod
    def cosine(cls, spec: TorusSpec, k: Sequence[int], amplitude: float = 1.0) -> "FourierField":
        """The real mode amplitude * cos(2 pi k.x)."""
        coeffs = np.zeros(spec.shape, dtype=np.complex128)
        coeffs[mode_index(spec, k)] += 0.5 * amplitude
        coeffs[mode_index(spec, [-c for c in k])] += 0.5 * amplitude
        return cls(spec, coeffs, reality=True)

    @classmethod
    def from_grid(
        cls, spec: TorusSpec, values: NDArray[Any], reality: Optional[bool] = None
    ) -> "FourierField":
        """Project grid samples onto the lattice; real samples give a real field."""
        values = np.asarray(values)
        if reality is None:
            reality = not np.iscomplexobj(values)
        return cls(spec, grid_to_coeffs(spec, values), reality=reality)

    @classmethod
    def from_vector(
        cls, spec: TorusSpec, vector: NDArray[Any], reality: bool = False
    ) -> "FourierField":
        """Inverse of `vector`: coefficients in lexicographic k order."""
        return cls(spec, np.asarray(vector).reshape(spec.shape), reality=reality)

    # Representation

    @property
    def vector(self) -> ComplexArray:
        """Coefficients flattened in lexicographic k order."""
        return self.coeffs.ravel()

    def coeff(self, k: Sequence[int]) -> complex:
        return complex(self.coeffs[mode_index(self.spec, k)])

    @property
    def mean(self) -> complex:
        """Zero mode, the average of the field over the torus."""
        return complex(self.coeffs[center_index(self.spec)])

    def grid(self, n: Optional[int] = None) -> NDArray[Any]:
        """Samples on the n^d grid (real array when the field is real)."""
        values = coeffs_to_grid(self.spec, self.coeffs, n)
        return values.real if self.reality else values

    def _replace(self, coeffs: ComplexArray, reality: Optional[bool] = None) -> "FourierField":
        return FourierField(
            self.spec,
            coeffs,
            reality=self.reality if reality is None else reality,
            zero_mode_excluded=False,
        )

    def check_same(self, other: "FourierField") -> None:
        """Raise SpecMismatchError unless both fields live on the same lattice."""
        if self.spec != other.spec:
            raise SpecMismatchError(
                f"Fields on different lattices: {self.spec!r} vs {other.spec!r}"
            )

    # Linear structure

    def __add__(self, other: "FourierField") -> "FourierField":
        self.check_same(other)
        return self._replace(self.coeffs + other.coeffs, self.reality and other.reality)

    def __sub__(self, other: "FourierField") -> "FourierField":
        self.check_same(other)
        return self._replace(self.coeffs - other.coeffs, self.reality and other.reality)

    def __neg__(self) -> "FourierField":
        return self._replace(-self.coeffs)

    def __mul__(self, scalar: Scalar) -> "FourierField":
        if isinstance(scalar, FourierField):
            raise TypeError("Use spectral.product for products of fields")
        real = self.reality and complex(scalar).imag == 0
        return self._replace(self.coeffs * scalar, real)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "FourierField":
        return self * (1.0 / scalar)

    def add_constant(self, value: Scalar) -> "FourierField":
        coeffs = self.coeffs.copy()
        coeffs[center_index(self.spec)] += value
        return self._replace(coeffs, self.reality and complex(value).imag == 0)

    def conj(self) -> "FourierField":
        """Complex conjugate field, coefficients conj c(-k)."""
        return self._replace(np.conj(np.flip(self.coeffs)))

    @property
    def real_part(self) -> "FourierField":
        return self._replace(0.5 * (self.coeffs + np.conj(np.flip(self.coeffs))), True)

    @property
    def imag_part(self) -> "FourierField":
        return self._replace(-0.5j * (self.coeffs - np.conj(np.flip(self.coeffs))), True)

    # Fourier multipliers

    def multiply(self, symbol: NDArray[Any], reality: Optional[bool] = None) -> "FourierField":
        """Apply the Fourier multiplier with the given symbol on the lattice."""
        return self._replace(self.coeffs * symbol, reality)

    def partial(self, axis: int) -> "FourierField":
        """Derivative along one axis, symbol 2 pi i k_a."""
        k = wavevectors(self.spec)[axis]
        return self.multiply(2j * math.pi * k)

    def grad(self) -> tuple["FourierField", ...]:
        return tuple(self.partial(a) for a in range(self.spec.dim))

    def laplacian(self) -> "FourierField":
        return self.multiply(laplacian_symbol(self.spec))

    def bessel(self) -> "FourierField":
        """(1 - Laplacian) f."""
        return self.multiply(bessel_symbol(self.spec))

    def bessel_inv(self) -> "FourierField":
        """(1 - Laplacian)^{-1} f."""
        return self.multiply(1.0 / bessel_symbol(self.spec))

    def inv_laplacian(self) -> "FourierField":
        """(-Laplacian)^{-1} f with the zero mode dropped."""
        ksq = k_squared(self.spec).astype(np.float64)
        with np.errstate(divide="ignore"):
            symbol = np.where(ksq > 0, 1.0 / (4.0 * math.pi**2 * ksq), 0.0)
        out = self.multiply(symbol)
        return FourierField(self.spec, out.coeffs, out.reality, zero_mode_excluded=True)

    def restrict(self, spec: TorusSpec) -> "FourierField":
        """Same coefficients on another lattice of the same dimension (pad or truncate)."""
        if spec.dim != self.spec.dim:
            raise SpecMismatchError(f"Cannot move a {self.spec.dim}-d field to dim={spec.dim}")
        coeffs = np.zeros(spec.shape, dtype=np.complex128)
        m = min(spec.K, self.spec.K)
        src = tuple(slice(self.spec.K - m, self.spec.K + m + 1) for _ in range(spec.dim))
        dst = tuple(slice(spec.K - m, spec.K + m + 1) for _ in range(spec.dim))
        coeffs[dst] = self.coeffs[src]
        return FourierField(spec, coeffs, self.reality, self.zero_mode_excluded)

    def cached_grid(self, key: Any, build: Callable[[], Any]) -> Any:
        """Per-field memo for derived grids (block decompositions and the like)."""
        if key not in self._grids:
            self._grids[key] = build()
        return self._grids[key]


VectorField = tuple[FourierField, ...]


def dft_forward(samples: NDArray[Any], spec: TorusSpec) -> FourierField:
    """Coefficients of grid samples taken at x_j = j/grid_n.

    Raises:
        SpecMismatchError: If the samples are not a grid_n^d array
    """
    samples = np.asarray(samples)
    if samples.shape != (spec.grid_n,) * spec.dim:
        raise SpecMismatchError(
            f"Samples of shape {samples.shape} do not match grid {(spec.grid_n,) * spec.dim}"
        )
    return FourierField.from_grid(spec, samples)


def dft_inverse(f: FourierField) -> NDArray[Any]:
    """Samples of a field on its grid_n^d collocation grid."""
    return f.grid()


def grid_points(spec: TorusSpec, n: Optional[int] = None) -> tuple[RealArray, ...]:
    """Coordinates x_j = j/n of the collocation grid."""
    n = spec.grid_n if n is None else n
    axis = np.arange(n) / n
    return tuple(np.meshgrid(*([axis] * spec.dim), indexing="ij"))


def product(*fields: FourierField) -> FourierField:
    """Alias-free pointwise product, projected back onto |k|_inf <= K."""
    if not fields:
        raise ValueError("product needs at least one field")
    first = fields[0]
    for f in fields[1:]:
        first.check_same(f)
    n = product_grid_size(first.spec, len(fields))
    values = first.grid(n)
    for f in fields[1:]:
        values = values * f.grid(n)
    return FourierField.from_grid(first.spec, values, all(f.reality for f in fields))


def dot(us: Sequence[FourierField], vs: Sequence[FourierField]) -> FourierField:
    """Projected sum of componentwise products of two vector fields."""
    if len(us) != len(vs):
        raise SpecMismatchError("Vector fields of different length")
    spec = us[0].spec
    n = product_grid_size(spec, 2)
    values = sum(u.grid(n) * v.grid(n) for u, v in zip(us, vs))
    return FourierField.from_grid(spec, np.asarray(values), all(f.reality for f in [*us, *vs]))


def apply_pointwise(
    fn: Callable[[NDArray[Any]], NDArray[Any]],
    f: FourierField,
    n: Optional[int] = None,
) -> FourierField:
    """Evaluate fn on grid samples of f and project back onto the lattice."""
    values = fn(f.grid(n))
    return FourierField.from_grid(f.spec, values, f.reality and not np.iscomplexobj(values))


def inner(f: FourierField, g: FourierField) -> complex:
    """L^2 inner product <f, g> = sum_k f(k) conj g(k)."""
    f.check_same(g)
    return complex(np.vdot(g.coeffs, f.coeffs))


def l2_norm(f: FourierField) -> float:
    return float(np.linalg.norm(f.coeffs))


def linf_norm(f: FourierField, n: Optional[int] = None) -> float:
    """Sup norm over the collocation grid."""
    return float(np.max(np.abs(f.grid(n))))
