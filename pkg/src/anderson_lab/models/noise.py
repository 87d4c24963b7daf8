"""Records describing enhanced-noise realizations."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class C2Variant(str, Enum):
    """Reading of the second 3-d renormalization constant."""

    PRINTED = "printed"
    SIGNED = "signed"
    WICK = "wick"


class NoiseRecord(BaseModel):
    """Manifest record of one enhanced-noise realization."""

    dim: int
    K: int
    seed: int
    eps: float = Field(..., gt=0)
    mollifier: str
    symbol_scale: float
    c_eps: Optional[float] = None
    c1_eps: Optional[float] = None
    c2_eps: Optional[float] = None
    c2_variant: Optional[C2Variant] = None
    truncated: bool = False
    norms: dict[str, float] = Field(default_factory=dict)
