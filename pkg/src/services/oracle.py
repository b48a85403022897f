"""
Brute-force ground truth for the cost model and the search engines.

``simulate`` literally executes the loop nest of a temporal mapping and
counts every memory access by tracking which tile each level holds.
``brute_force_best`` evaluates every distinct ordering of a small layer.
"""

import itertools
from typing import Dict, List, Optional, Tuple

from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.mapping import READ, WRITE, AccessKey, AllocationMode, SimTrace, TemporalMapping
from src.models.workload import OPERANDS, LayerSpec, OperandKind
from src.services.allocator import allocate
from src.services.archspec import operand_chain
from src.services.cost_model import evaluate, objective
from src.services.ordering import count_distinct_orderings, generate_orderings
from src.services.workload import RELEVANT_DIMS, dim_products, lpf_decompose, tile_footprint
from src.utils.errors import BudgetExceeded, SpaceTooLarge
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_BUDGET = 10**6
BRUTE_FORCE_LIMIT = 10**5
OUTPUT_DIMS = ("B", "K", "OY", "OX")


class _Residency:
    """The tile one serving level of an operand currently holds."""

    def __init__(self, operand: OperandKind, lower: str, upper: str, words: int, positions: List[int]):
        self.operand = operand
        self.lower = lower
        self.upper = upper
        self.words = words
        self.positions = positions
        self.current: Optional[tuple] = None
        self.seen = set()


def simulate(mapping: TemporalMapping, layer: LayerSpec, arch: ArchSpec,
             budget: int = DEFAULT_BUDGET) -> SimTrace:
    """
    Execute the mapping's loop nest, innermost loop fastest, and count accesses.

    A level's resident tile is identified by the indices of the operand-relevant
    loops above it; every change of identity is a refill from the level above.
    Output tiles are written back when replaced and at the end, and read back
    only when revisited. At the lowest level each MAC reads I and W and writes
    O, reading O except on the first touch of each output word.

    Raises:
        BudgetExceeded: the nest has more than ``budget`` iterations.
        ValueError: the mapping does not cover the layer without spatial unrolling.
    """
    loops = mapping.ordering
    n = len(loops)
    iterations = 1
    for loop in loops:
        iterations *= loop.factor
    if iterations > budget:
        raise BudgetExceeded(f"simulation needs {iterations} iterations, budget is {budget}")
    if dim_products(loops) != layer.sizes():
        raise ValueError("simulate needs a temporal-only mapping covering the whole layer")

    # position of each loop's index inside its dimension
    strides = []
    running: Dict[str, int] = {}
    for loop in loops:
        strides.append(running.get(loop.dim, 1))
        running[loop.dim] = running.get(loop.dim, 1) * loop.factor
    output_terms = [
        [(p, strides[p]) for p, loop in enumerate(loops) if loop.dim == dim] for dim in OUTPUT_DIMS
    ]

    accesses: Dict[AccessKey, int] = {}
    residencies: List[_Residency] = []
    lowest: Dict[OperandKind, str] = {}
    for operand in OPERANDS:
        chain = operand_chain(arch, operand)
        names = [arch.levels[index].name for index in chain]
        for name in names:
            accesses[(operand, name, READ)] = 0
            accesses[(operand, name, WRITE)] = 0
        lowest[operand] = names[0]
        for boundary, split in enumerate(mapping.boundaries[operand]):
            sizes: Dict[str, int] = {}
            for loop in loops[:split]:
                sizes[loop.dim] = sizes.get(loop.dim, 1) * loop.factor
            positions = [p for p in range(split, n) if loops[p].dim in RELEVANT_DIMS[operand]]
            residencies.append(_Residency(
                operand, names[boundary], names[boundary + 1],
                tile_footprint(operand, sizes, layer), positions,
            ))

    touched = set()
    ranges = [range(loop.factor) for loop in reversed(loops)]
    for outer_first in itertools.product(*ranges):
        index = outer_first[::-1]

        accesses[(OperandKind.I, lowest[OperandKind.I], READ)] += 1
        accesses[(OperandKind.W, lowest[OperandKind.W], READ)] += 1
        accesses[(OperandKind.O, lowest[OperandKind.O], WRITE)] += 1
        element = tuple(sum(index[p] * stride for p, stride in terms) for terms in output_terms)
        if element in touched:
            accesses[(OperandKind.O, lowest[OperandKind.O], READ)] += 1
        else:
            touched.add(element)

        for residency in residencies:
            tile = tuple(index[p] for p in residency.positions)
            if tile == residency.current:
                continue
            operand, words = residency.operand, residency.words
            if operand == OperandKind.O:
                if residency.current is not None:
                    _write_back(accesses, residency)
                if tile in residency.seen:
                    accesses[(operand, residency.upper, READ)] += words
                    accesses[(operand, residency.lower, WRITE)] += words
            else:
                accesses[(operand, residency.upper, READ)] += words
                accesses[(operand, residency.lower, WRITE)] += words
            residency.seen.add(tile)
            residency.current = tile

    for residency in residencies:
        if residency.operand == OperandKind.O and residency.current is not None:
            _write_back(accesses, residency)

    return SimTrace(accesses=accesses, iterations_executed=iterations)


def _write_back(accesses: Dict[AccessKey, int], residency: _Residency) -> None:
    accesses[(residency.operand, residency.lower, READ)] += residency.words
    accesses[(residency.operand, residency.upper, WRITE)] += residency.words


def diff_accesses(expected: Dict[AccessKey, int], actual: Dict[AccessKey, int]) -> List[Tuple[AccessKey, int, int]]:
    """Keys whose counts differ, as (key, expected, actual)."""
    keys = list(expected) + [key for key in actual if key not in expected]
    return [
        (key, expected.get(key, 0), actual.get(key, 0))
        for key in keys
        if expected.get(key, 0) != actual.get(key, 0)
    ]


def brute_force_best(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling,
                     mode: AllocationMode, limit: int = BRUTE_FORCE_LIMIT) -> Tuple[TemporalMapping, float]:
    """
    Evaluate every distinct ordering and return the cheapest (first one on ties).

    Raises:
        SpaceTooLarge: more than ``limit`` distinct orderings.
    """
    lpfs = lpf_decompose(layer, spatial)
    distinct = count_distinct_orderings(lpfs)
    if distinct > limit:
        raise SpaceTooLarge(f"Layer {layer.name}: {distinct} orderings exceed the brute-force limit {limit}")

    best_mapping, best_value = None, None
    for ordering in generate_orderings(lpfs):
        mapping = allocate(ordering, layer, arch, spatial, mode)
        value = objective(evaluate(mapping, layer, arch, spatial))
        if best_value is None or value < best_value:
            best_mapping, best_value = mapping, value
    logger.debug(f"Brute force on {layer.name}: {distinct} orderings, optimum {best_value}")
    return best_mapping, best_value
