"""
Serialized result models written by the command-line tools.
Uses Pydantic for validation and JSON round-tripping.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class BoundaryRecord(BaseModel):
    """Where one operand crosses from one serving level into the next."""

    model_config = ConfigDict(extra="forbid")

    lower: str = Field(..., description="Level below the transition")
    upper: str = Field(..., description="Level above the transition")
    position: int = Field(..., description="Loops [0, position) are held at or below 'lower'")


class CostRow(BaseModel):
    """Access counts and energy of one operand at one level."""

    model_config = ConfigDict(extra="forbid")

    operand: str
    level: str
    reads: int
    writes: int
    energy: float


class SaParamsEcho(BaseModel):
    model_config = ConfigDict(extra="forbid")

    iterations: int
    rho: float
    t0: float
    seed: int
    restarts: int
    initial: str


class RunReport(BaseModel):
    """Result of scheduling one layer."""

    model_config = ConfigDict(extra="forbid")

    layer: str = Field(..., description="Layer name")
    engine_used: str = Field(..., description="exhaustive or sa")
    mode: str = Field(..., description="even or uneven allocation")
    ordering: List[Tuple[str, int]] = Field(..., description="Loops as [dim, factor], innermost first")
    boundaries: Dict[str, List[BoundaryRecord]] = Field(..., description="Per-operand level transitions")
    costs: List[CostRow] = Field(..., description="Per operand and level access counts and energy")
    mac_count: int
    mac_energy: float
    total_energy: float
    objective: float
    evaluations: int
    # decimal string: the count can exceed 64 bits
    distinct_orderings: str
    lpf_limit: Optional[int] = None
    wall_time: float
    sa_params: SaParamsEcho


class SweepEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    multiplicity: int
    report: RunReport


class SweepReport(BaseModel):
    """Result of scheduling every unique layer of a network."""

    model_config = ConfigDict(extra="forbid")

    network: str
    total_layers: int
    unique_layers: int
    total_energy: float = Field(..., description="Sum of layer objective times multiplicity")
    entries: List[SweepEntry] = Field(default_factory=list)


class ValidationCase(BaseModel):
    """Outcome of one cost-model versus simulation check."""

    model_config = ConfigDict(extra="forbid")

    name: str
    passed: bool
    mismatches: List[Tuple[str, str, str, int, int]] = Field(
        default_factory=list, description="(operand, level, read|write, expected, actual)"
    )
    counts: List[Tuple[str, str, str, int, int]] = Field(
        default_factory=list, description="Full (operand, level, read|write, predicted, simulated) table; filled on failure"
    )


class ValidationReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    passed: bool
    checks: int
    failures: int
    cases: List[ValidationCase] = Field(default_factory=list)
