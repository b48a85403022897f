"""
Data models for the accelerator: memory levels, PE array and spatial unrolling.
"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.workload import DIMS, OperandKind


class MemoryLevel(BaseModel):
    """One level of the memory hierarchy."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., description="Level name")
    capacity_bits: Optional[int] = Field(
        ..., description="Capacity in bits; None (\"unbounded\" in config files) for the top level"
    )
    read_energy: float = Field(..., ge=0, description="Energy per word read")
    write_energy: float = Field(..., ge=0, description="Energy per word written")
    serves: Tuple[OperandKind, ...] = Field(..., description="Operands stored at this level")
    shared: bool = Field(..., description="One instance for the whole array (True) or one per PE (False)")

    @field_validator('capacity_bits', mode='before')
    @classmethod
    def parse_capacity(cls, v):
        if isinstance(v, str) and v.lower() == "unbounded":
            return None
        if v is not None and int(v) < 1:
            raise ValueError('capacity_bits must be positive or "unbounded"')
        return v

    @property
    def unbounded(self) -> bool:
        return self.capacity_bits is None

    def to_config(self) -> dict:
        data = self.model_dump(mode="json")
        if self.capacity_bits is None:
            data["capacity_bits"] = "unbounded"
        return data


class ArchSpec(BaseModel):
    """PE array and memory hierarchy, lowest level first."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str
    pe_rows: int = Field(..., ge=1)
    pe_cols: int = Field(..., ge=1)
    mac_energy: float = Field(..., ge=0)
    levels: Tuple[MemoryLevel, ...]

    def scaled(self, factor: float) -> "ArchSpec":
        """Copy with every energy coefficient multiplied by ``factor``."""
        levels = tuple(
            level.model_copy(update={
                "read_energy": level.read_energy * factor,
                "write_energy": level.write_energy * factor,
            })
            for level in self.levels
        )
        return self.model_copy(update={"mac_energy": self.mac_energy * factor, "levels": levels})

    def to_config(self) -> dict:
        return {
            "name": self.name,
            "pe_rows": self.pe_rows,
            "pe_cols": self.pe_cols,
            "mac_energy": self.mac_energy,
            "levels": [level.to_config() for level in self.levels],
        }


class Axis(str, Enum):
    ROW = "row"
    COL = "col"


class SpatialEntry(BaseModel):
    """One parfor loop mapped onto an axis of the PE array."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    dim: str
    factor: int = Field(..., gt=1)
    axis: Axis

    @field_validator('dim')
    @classmethod
    def validate_dim(cls, v):
        if v not in DIMS:
            raise ValueError(f'dim must be one of {list(DIMS)}')
        return v


class SpatialUnrolling(BaseModel):
    """The fixed spatial unrolling; empty means temporal-only."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    entries: Tuple[SpatialEntry, ...] = ()

    def factor_of(self, dim: str) -> int:
        product = 1
        for entry in self.entries:
            if entry.dim == dim:
                product *= entry.factor
        return product

    def axis_product(self, axis: Axis) -> int:
        product = 1
        for entry in self.entries:
            if entry.axis == axis:
                product *= entry.factor
        return product

    def to_config(self) -> list:
        return [entry.model_dump(mode="json") for entry in self.entries]


class ArchViolation(BaseModel):
    """One broken architecture invariant."""

    code: str
    message: str
