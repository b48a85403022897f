"""
Curated deterministic fixtures, the cost-model validation harness and the
annealing optimality study.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.models.arch import ArchSpec, MemoryLevel, SpatialUnrolling
from src.models.mapping import AllocationMode, LoopOrdering, SaParams
from src.models.report import CostRow, ValidationCase
from src.models.workload import LayerSpec, OperandKind
from src.services.allocator import allocate
from src.services.cost_model import evaluate
from src.services.engines import sa_search
from src.services.oracle import BRUTE_FORCE_LIMIT, DEFAULT_BUDGET, brute_force_best, diff_accesses, simulate
from src.services.ordering import canonical_ordering, count_distinct_orderings, random_ordering
from src.services.reporting import cost_rows
from src.services.workload import lpf_decompose
from src.utils.errors import SpaceTooLarge
from src.utils.logger import get_logger
from src.utils.rng import SeededRNG

logger = get_logger(__name__)

ALL = ("I", "W", "O")


class FixtureExpectation(BaseModel):
    """Values produced by the oracle; never written by hand."""

    model_config = ConfigDict(extra="forbid")

    distinct_orderings: int
    optimal_objective: float
    canonical_accesses: Optional[List[CostRow]] = None


class Fixture(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    layer: LayerSpec
    arch: ArchSpec
    spatial: SpatialUnrolling = Field(default_factory=SpatialUnrolling)
    mode: AllocationMode = AllocationMode.UNEVEN
    expected: Optional[FixtureExpectation] = None

    @field_validator('spatial', mode='before')
    @classmethod
    def parse_spatial_list(cls, v):
        if v is None:
            return {"entries": []}
        if isinstance(v, list):
            return {"entries": v}
        return v

    def to_config(self) -> dict:
        data = {
            "name": self.name,
            "layer": self.layer.to_config(),
            "arch": self.arch.to_config(),
            "spatial": self.spatial.to_config(),
            "mode": self.mode.value,
        }
        if self.expected is not None:
            data["expected"] = self.expected.model_dump(mode="json", exclude_none=True)
        return data


def _level(name: str, capacity_bits: Optional[int], energy: float, serves: Sequence[str],
           shared: bool) -> MemoryLevel:
    return MemoryLevel(
        name=name, capacity_bits=capacity_bits, read_energy=energy, write_energy=energy,
        serves=tuple(OperandKind(op) for op in serves), shared=shared,
    )


def _arch(name: str, *levels: MemoryLevel) -> ArchSpec:
    return ArchSpec(name=name, pe_rows=1, pe_cols=1, mac_energy=1.0, levels=levels)


def toy_architectures() -> Dict[str, ArchSpec]:
    """Small temporal-only hierarchies, 8-bit words."""
    return {
        "two_level": _arch(
            "two_level",
            _level("reg", 64, 1.0, ALL, False),
            _level("dram", None, 100.0, ALL, True),
        ),
        "three_level": _arch(
            "three_level",
            _level("reg", 32, 0.5, ALL, False),
            _level("buffer", 512, 6.0, ALL, True),
            _level("dram", None, 200.0, ALL, True),
        ),
        "eyeriss_mini": _arch(
            "eyeriss_mini",
            _level("spad_w", 64, 1.0, ["W"], False),
            _level("spad_i", 24, 1.0, ["I"], False),
            _level("spad_o", 32, 1.0, ["O"], False),
            _level("global_buffer", 1024, 6.0, ["I", "O"], True),
            _level("dram", None, 200.0, ALL, True),
        ),
        "w_bypass": _arch(
            "w_bypass",
            _level("rf", 48, 1.0, ALL, False),
            _level("global_buffer", 768, 6.0, ["I", "O"], True),
            _level("dram", None, 200.0, ALL, True),
        ),
    }


def _layer(name: str, **dims) -> LayerSpec:
    return LayerSpec(name=name, **dims)


def toy_layers() -> List[LayerSpec]:
    """Layers small enough for literal simulation (at most 10^4 MACs)."""
    return [
        _layer("kc", K=4, C=4),
        _layer("conv_fx", K=2, C=3, OY=4, OX=2, FX=3),
        _layer("strided", K=2, C=2, OY=2, OX=4, FX=3, stride_x=2),
        _layer("batched", B=2, K=4, C=2, OX=3, FX=2),
        _layer("window", K=2, C=2, OY=3, OX=3, FY=3, FX=3, stride_y=2),
    ]


def builtin_fixtures() -> List[Fixture]:
    """Every toy layer on every toy architecture, alternating allocation modes."""
    fixtures = []
    modes = (AllocationMode.UNEVEN, AllocationMode.EVEN)
    for arch_index, (arch_name, arch) in enumerate(toy_architectures().items()):
        for layer_index, layer in enumerate(toy_layers()):
            mode = modes[(arch_index + layer_index) % 2]
            fixtures.append(Fixture(name=f"{layer.name}@{arch_name}-{mode.value}",
                                    layer=layer, arch=arch, mode=mode))
    return fixtures


def study_fixtures() -> List[Fixture]:
    """Layers whose ordering spaces hold between 10^3 and 10^5 distinct orderings."""
    arch = _arch(
        "study_three_level",
        _level("reg", 64, 0.5, ALL, False),
        _level("buffer", 1024, 6.0, ALL, True),
        _level("dram", None, 200.0, ALL, True),
    )
    layers = [
        _layer("k8c4oy4ox2", K=8, C=4, OY=4, OX=2),
        _layer("k16c8ox4", K=16, C=8, OX=4),
        _layer("k4c4oy2ox2fy3", K=4, C=4, OY=2, OX=2, FY=3),
        _layer("b2k8c4ox4fx3", B=2, K=8, C=4, OX=4, FX=3),
    ]
    return [
        Fixture(name=f"{layer.name}-{mode.value}", layer=layer, arch=arch, mode=mode)
        for layer in layers
        for mode in (AllocationMode.UNEVEN, AllocationMode.EVEN)
    ]


def random_fixtures(count: int, seed: int) -> List[Tuple[Fixture, LoopOrdering]]:
    """Randomized toy layers and 2-3 level hierarchies, each with one random ordering."""
    rng = SeededRNG(seed).fork("random-fixtures")

    def pick(options):
        return options[rng.randrange(len(options))]

    cases = []
    for index in range(count):
        layer = LayerSpec(
            name=f"random_{index}",
            B=pick([1, 2]), K=pick([1, 2, 3, 4]), C=pick([1, 2, 3, 4]),
            OY=pick([1, 2, 3, 4]), OX=pick([1, 2, 3, 4]),
            FY=pick([1, 2, 3]), FX=pick([1, 2, 3]),
            stride_y=pick([1, 2]), stride_x=pick([1, 2]),
        )
        levels = [_level("l0", 8 * (1 + rng.randrange(16)), 0.25 + rng.random(), ALL, False)]
        if rng.randrange(2):
            serves = [op for op in ALL if rng.randrange(2)] or [pick(list(ALL))]
            levels.append(_level("l1", 8 * (16 + rng.randrange(240)), 2.0 + 8.0 * rng.random(), serves, True))
        levels.append(_level("dram", None, 100.0 + 100.0 * rng.random(), ALL, True))
        arch = _arch(f"random_arch_{index}", *levels)
        mode = pick([AllocationMode.UNEVEN, AllocationMode.EVEN])
        fixture = Fixture(name=f"random_{index}-{mode.value}", layer=layer, arch=arch, mode=mode)
        ordering = random_ordering(lpf_decompose(layer, fixture.spatial), rng)
        cases.append((fixture, ordering))
    return cases


def _key_text(key) -> Tuple[str, str, str]:
    operand, level, kind = key
    return operand.value, level, kind


def check_ordering(fixture: Fixture, ordering: LoopOrdering, label: str,
                   budget: int = DEFAULT_BUDGET) -> ValidationCase:
    """Compare the analytical counts with the simulated ones for one ordering."""
    mapping = allocate(ordering, fixture.layer, fixture.arch, fixture.spatial, fixture.mode)
    predicted = evaluate(mapping, fixture.layer, fixture.arch, fixture.spatial).accesses
    simulated = simulate(mapping, fixture.layer, fixture.arch, budget).accesses
    mismatches = [(*_key_text(key), expected, actual)
                  for key, expected, actual in diff_accesses(predicted, simulated)]

    if fixture.expected is not None and fixture.expected.canonical_accesses is not None \
            and tuple(ordering) == canonical_ordering(ordering):
        recorded = {}
        for row in fixture.expected.canonical_accesses:
            operand = OperandKind(row.operand)
            recorded[(operand, row.level, "read")] = row.reads
            recorded[(operand, row.level, "write")] = row.writes
        mismatches.extend((*_key_text(key), expected, actual)
                          for key, expected, actual in diff_accesses(recorded, simulated))

    if not mismatches:
        return ValidationCase(name=label, passed=True)
    logger.error(f"Validation mismatch on {label}: {mismatches[0]}")
    counts = [(*_key_text(key), predicted[key], simulated.get(key, 0)) for key in predicted]
    return ValidationCase(name=label, passed=False, mismatches=mismatches, counts=counts)


def validate_fixture(fixture: Fixture, extra_orderings: int = 5, seed: int = 0,
                     budget: int = DEFAULT_BUDGET) -> List[ValidationCase]:
    """Check the canonical ordering plus a few seeded random orderings of a fixture."""
    lpfs = lpf_decompose(fixture.layer, fixture.spatial)
    rng = SeededRNG(seed).fork(fixture.name)
    orderings = [canonical_ordering(lpfs)] + [random_ordering(lpfs, rng) for _ in range(extra_orderings)]
    return [
        check_ordering(fixture, ordering, f"{fixture.name}#{index}", budget)
        for index, ordering in enumerate(orderings)
    ]


def expectation_for(fixture: Fixture) -> FixtureExpectation:
    """Oracle-produced expectations for a fixture."""
    lpfs = lpf_decompose(fixture.layer, fixture.spatial)
    _, optimum = brute_force_best(fixture.layer, fixture.arch, fixture.spatial, fixture.mode)
    mapping = allocate(canonical_ordering(lpfs), fixture.layer, fixture.arch, fixture.spatial, fixture.mode)
    trace = simulate(mapping, fixture.layer, fixture.arch)
    cost = evaluate(mapping, fixture.layer, fixture.arch, fixture.spatial)
    rows = [
        row.model_copy(update={
            "reads": trace.accesses[(OperandKind(row.operand), row.level, "read")],
            "writes": trace.accesses[(OperandKind(row.operand), row.level, "write")],
        })
        for row in cost_rows(cost)
    ]
    return FixtureExpectation(
        distinct_orderings=count_distinct_orderings(lpfs),
        optimal_objective=optimum,
        canonical_accesses=rows,
    )


@dataclass
class StudyRow:
    fixture: str
    distinct_orderings: int
    optimum: float
    runs: int
    hits: int
    excess_sum: float

    @property
    def hit_rate(self) -> float:
        return self.hits / self.runs if self.runs else 1.0

    @property
    def mean_excess(self) -> float:
        return self.excess_sum / self.runs if self.runs else 0.0


@dataclass
class StudyResult:
    hit_rate: float
    mean_excess: float
    rows: List[StudyRow] = field(default_factory=list)


def is_hit(value: float, optimum: float) -> bool:
    return math.isclose(value, optimum, rel_tol=1e-12, abs_tol=0.0)


def optimality_study(fixtures: Sequence[Fixture], runs: int, base_seed: int,
                     params: Optional[SaParams] = None) -> StudyResult:
    """
    Run annealing ``runs`` times per fixture (seeds base_seed + run) and compare
    each best objective with the brute-force optimum.

    Raises:
        SpaceTooLarge: a fixture's space is too large for brute force.
    """
    params = params or SaParams()
    for fixture in fixtures:
        distinct = count_distinct_orderings(lpf_decompose(fixture.layer, fixture.spatial))
        if distinct > BRUTE_FORCE_LIMIT:
            raise SpaceTooLarge(f"Fixture {fixture.name}: {distinct} orderings, study needs <= {BRUTE_FORCE_LIMIT}")

    rows = []
    for fixture in fixtures:
        lpfs = lpf_decompose(fixture.layer, fixture.spatial)
        if fixture.expected is not None:
            optimum = fixture.expected.optimal_objective
        else:
            _, optimum = brute_force_best(fixture.layer, fixture.arch, fixture.spatial, fixture.mode)
        row = StudyRow(fixture.name, count_distinct_orderings(lpfs), optimum, runs, 0, 0.0)
        for run in range(runs):
            run_params = params.model_copy(update={"seed": base_seed + run})
            result = sa_search(fixture.layer, fixture.arch, fixture.spatial, fixture.mode, run_params)
            row.hits += is_hit(result.best_objective, optimum)
            row.excess_sum += result.best_objective / optimum - 1.0
        logger.info(f"Study {fixture.name}: hit rate {row.hit_rate:.3f}, mean excess {row.mean_excess:.2e}")
        rows.append(row)

    total_runs = sum(row.runs for row in rows)
    if total_runs == 0:
        return StudyResult(hit_rate=1.0, mean_excess=0.0, rows=rows)
    return StudyResult(
        hit_rate=sum(row.hits for row in rows) / total_runs,
        mean_excess=sum(row.excess_sum for row in rows) / total_runs,
        rows=rows,
    )
