"""
Data models for convolutional layer workloads.
Uses Pydantic for validation of layer config files.
"""

from enum import Enum
from typing import Dict, NamedTuple, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class OperandKind(str, Enum):
    """The three tensors a convolution touches."""

    I = "I"
    W = "W"
    O = "O"


OPERANDS: Tuple[OperandKind, ...] = (OperandKind.I, OperandKind.W, OperandKind.O)

# Canonical dimension order; also the order of LPF lists and generated orderings.
DIMS: Tuple[str, ...] = ("B", "K", "C", "OY", "OX", "FY", "FX")
DIM_RANK: Dict[str, int] = {dim: rank for rank, dim in enumerate(DIMS)}


class Loop(NamedTuple):
    """A temporal loop: a dimension and its (usually prime) size."""

    dim: str
    factor: int

    def sort_key(self) -> Tuple[int, int]:
        return (DIM_RANK[self.dim], self.factor)

    def label(self) -> str:
        return f"{self.dim}{self.factor}"


# An LPF is a Loop whose factor is prime.
Lpf = Loop


def _default_word_bits() -> Dict[OperandKind, int]:
    return {OperandKind.I: 8, OperandKind.W: 8, OperandKind.O: 8}


class LayerSpec(BaseModel):
    """A layer's seven loop dimensions, strides and operand word widths."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    name: str = Field(..., description="Layer name")
    b: int = Field(1, ge=1, alias="B", description="Batch")
    k: int = Field(1, ge=1, alias="K", description="Output channels")
    c: int = Field(1, ge=1, alias="C", description="Input channels")
    oy: int = Field(1, ge=1, alias="OY", description="Output rows")
    ox: int = Field(1, ge=1, alias="OX", description="Output columns")
    fy: int = Field(1, ge=1, alias="FY", description="Filter rows")
    fx: int = Field(1, ge=1, alias="FX", description="Filter columns")
    stride_y: int = Field(1, ge=1, description="Vertical stride")
    stride_x: int = Field(1, ge=1, description="Horizontal stride")
    word_bits: Dict[OperandKind, int] = Field(
        default_factory=_default_word_bits, description="Bits per word for I, W and O"
    )

    @field_validator('word_bits')
    @classmethod
    def validate_word_bits(cls, v):
        """Every operand needs a positive word width."""
        missing = [op.value for op in OperandKind if op not in v]
        if missing:
            raise ValueError(f'word_bits missing operands: {missing}')
        if any(bits < 1 for bits in v.values()):
            raise ValueError('word_bits must be positive')
        return v

    def dim_size(self, dim: str) -> int:
        return getattr(self, dim.lower())

    def sizes(self) -> Dict[str, int]:
        return {dim: self.dim_size(dim) for dim in DIMS}

    def shape_key(self) -> tuple:
        """All numeric fields; layers with equal keys schedule identically."""
        return (
            tuple(self.dim_size(dim) for dim in DIMS),
            self.stride_y,
            self.stride_x,
            tuple(self.word_bits[op] for op in OPERANDS),
        )

    def to_config(self) -> dict:
        """Serialize with the exact config-file keys."""
        return self.model_dump(by_alias=True, mode="json")

