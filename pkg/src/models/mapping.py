"""
Value types for temporal mappings, cost breakdowns and search results.

These sit on the search hot path, so they are plain frozen dataclasses;
the Pydantic models in ``src.models.report`` are the serialized views.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.workload import Loop, OperandKind

LoopOrdering = Tuple[Loop, ...]

READ = "read"
WRITE = "write"

AccessKey = Tuple[OperandKind, str, str]
EnergyKey = Tuple[OperandKind, str]


class AllocationMode(str, Enum):
    EVEN = "even"
    UNEVEN = "uneven"


class EngineKind(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SA = "sa"
    RANDOM = "random"


class Metric(str, Enum):
    ENERGY = "energy"
    LATENCY = "latency"
    EDP = "edp"


@dataclass(frozen=True)
class TemporalMapping:
    """A loop ordering plus, per operand, where each serving-level transition sits.

    ``boundaries[X][j] = t`` means loops ``[0, t)`` are held at or below the
    j-th level of X's serving chain.
    """

    ordering: LoopOrdering
    boundaries: Dict[OperandKind, Tuple[int, ...]]
    mode: AllocationMode


@dataclass(frozen=True)
class CostBreakdown:
    mac_count: int
    accesses: Dict[AccessKey, int]
    energy_terms: Dict[EnergyKey, float]
    mac_energy_total: float
    total_energy: float

    def reads(self, operand: OperandKind, level: str) -> int:
        return self.accesses.get((operand, level, READ), 0)

    def writes(self, operand: OperandKind, level: str) -> int:
        return self.accesses.get((operand, level, WRITE), 0)


@dataclass(frozen=True)
class SimTrace:
    accesses: Dict[AccessKey, int]
    iterations_executed: int


class SaParams(BaseModel):
    """Simulated-annealing hyperparameters."""

    model_config = ConfigDict(frozen=True)

    iterations: int = Field(1000, ge=1)
    rho: float = Field(0.999, gt=0, lt=1)
    t0: float = Field(0.05, gt=0)
    seed: int = 0
    restarts: int = Field(1, ge=1)
    initial: str = "random"

    @field_validator('initial')
    @classmethod
    def validate_initial(cls, v):
        if v not in ("random", "canonical"):
            raise ValueError('initial must be "random" or "canonical"')
        return v


class TraceEntry(NamedTuple):
    chain: int
    iteration: int
    objective: float
    accepted: bool
    temperature: float


@dataclass
class SearchResult:
    best_mapping: TemporalMapping
    best_cost: CostBreakdown
    best_objective: float
    engine_used: EngineKind
    evaluations: int
    wall_time: float
    distinct_orderings: int
    trace: Optional[List[TraceEntry]] = None
    initial_objectives: List[float] = field(default_factory=list)
