"""Torus lattice specification and norm reports."""

import math
from typing import Any

from pydantic import BaseModel, Field, model_validator


def default_grid_n(K: int) -> int:
    """Smallest even grid size that resolves quadratic products of band-K fields."""
    n = 3 * K + 1
    return n + (n % 2)


class TorusSpec(BaseModel):
    """Truncated Fourier lattice {k : |k|_inf <= K} of the d-dimensional torus."""

    dim: int = Field(..., ge=2, le=3, description="Space dimension")
    K: int = Field(..., ge=4, description="Coefficients kept for |k|_inf <= K")
    grid_n: int = Field(..., description="Collocation points per axis")

    model_config = {"frozen": True}

    @model_validator(mode="before")
    @classmethod
    def _fill_grid(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("grid_n") is None and "K" in data:
            data = {**data, "grid_n": default_grid_n(int(data["K"]))}
        return data

    @model_validator(mode="after")
    def _check_grid(self) -> "TorusSpec":
        if self.grid_n < 2 * self.K + 1 or self.grid_n % 2:
            raise ValueError(
                f"grid_n must be even and >= 2K+1 (got grid_n={self.grid_n}, K={self.K})"
            )
        return self

    @property
    def side(self) -> int:
        """Lattice points per axis."""
        return 2 * self.K + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.side,) * self.dim

    @property
    def n_modes(self) -> int:
        return self.side**self.dim

    @property
    def max_radius(self) -> float:
        """Largest euclidean |k| on the lattice."""
        return self.K * math.sqrt(self.dim)

    def with_K(self, K: int) -> "TorusSpec":
        """Same dimension at another cutoff, default grid."""
        return TorusSpec(dim=self.dim, K=K, grid_n=default_grid_n(K))


class BlockNorm(BaseModel):
    """L^p norm of one Littlewood-Paley block."""

    j: int = Field(..., ge=-1)
    value: float = Field(..., ge=0)


class NormReport(BaseModel):
    """Besov norm with its per-block breakdown."""

    alpha: float
    p: float = Field(..., ge=1)
    q: float = Field(..., ge=1)
    value: float = Field(..., ge=0)
    per_block: list[BlockNorm] = Field(default_factory=list)

    def recompute(self) -> float:
        """Recompute the norm from the stored block norms."""
        weighted = [2.0 ** (b.j * self.alpha) * b.value for b in self.per_block]
        if not weighted:
            return 0.0
        if math.isinf(self.q):
            return max(weighted)
        return float(sum(w**self.q for w in weighted) ** (1.0 / self.q))
