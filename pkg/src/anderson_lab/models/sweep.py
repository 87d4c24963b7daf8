"""Estimate-ratio sweep records."""

import math

from pydantic import BaseModel, Field


class RatioSweep(BaseModel):
    """Ratios lhs/rhs of one a-priori estimate over random samples at one resolution."""

    name: str
    K: int = Field(..., ge=1)
    samples: int = Field(..., ge=0)
    ratios: list[float] = Field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(r) for r in self.ratios)


class ResolutionComparison(BaseModel):
    """The same sweep at K and 2K with a fixed realization extension."""

    coarse: RatioSweep
    fine: RatioSweep

    @property
    def factor(self) -> float:
        """Ratio of the larger to the smaller maximum (1 when both vanish)."""
        a, b = self.coarse.max_ratio, self.fine.max_ratio
        if a == 0.0 and b == 0.0:
            return 1.0
        if min(a, b) == 0.0:
            return math.inf
        return max(a, b) / min(a, b)

    @property
    def stable(self) -> bool:
        return self.coarse.bounded and self.fine.bounded and self.factor <= 2.0
