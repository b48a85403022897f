"""
Bottom-up memory allocation: infers, from a loop ordering, where each
operand's loops live in the memory hierarchy (even or uneven mapping).
"""

from typing import Dict, List, Optional, Sequence, Tuple

from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.mapping import AllocationMode, LoopOrdering, TemporalMapping
from src.models.workload import OPERANDS, LayerSpec, OperandKind
from src.services.archspec import operand_chain, spatial_scale
from src.services.workload import tile_footprint
from src.utils.errors import InfeasibleLowestLevel


def _word_limits(arch: ArchSpec, chain: List[int], layer: LayerSpec, operand: OperandKind,
                 spatial: SpatialUnrolling) -> List[Optional[int]]:
    """
    Per chain position, the largest per-PE tile (in words) that position can hold.

    Levels are inclusive: whatever sits at a level also occupies every serving
    level above it, so a position's limit is the tightest of itself and all
    bounded levels above. Shared levels hold one tile per distinct PE slice.
    None means unlimited.
    """
    p_total, reuse = spatial_scale(operand, spatial)
    replication = p_total // reuse
    bits = layer.word_bits[operand]
    limits: List[Optional[int]] = []
    tightest: Optional[int] = None
    for index in reversed(chain):
        level = arch.levels[index]
        if not level.unbounded:
            copies = replication if level.shared else 1
            words = level.capacity_bits // (bits * copies)
            tightest = words if tightest is None else min(tightest, words)
        limits.append(tightest)
    limits.reverse()
    return limits


def _fits(footprint: int, limit: Optional[int]) -> bool:
    return limit is None or footprint <= limit


def allocate(o: LoopOrdering, layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling,
             mode: AllocationMode) -> TemporalMapping:
    """
    Assign the ordering's loops, innermost first, to the lowest memory level
    that still holds the cumulative tile. Promotion is monotonic.

    Uneven mode walks each operand's serving chain on its own. Even mode
    keeps one pointer into every operand's chain: as soon as any operand
    overflows its current serving level, all operands move up one serving
    level, so boundaries are shared position by position.

    Raises:
        InfeasibleLowestLevel: a one-word tile does not fit an operand's lowest level.
    """
    chains = {operand: operand_chain(arch, operand) for operand in OPERANDS}
    limits = {operand: _word_limits(arch, chains[operand], layer, operand, spatial) for operand in OPERANDS}

    for operand in OPERANDS:
        if not _fits(tile_footprint(operand, {}, layer), limits[operand][0]):
            lowest = arch.levels[chains[operand][0]].name
            raise InfeasibleLowestLevel(
                f"Layer {layer.name}: a single {operand.value} word does not fit '{lowest}'"
            )

    if AllocationMode(mode) == AllocationMode.UNEVEN:
        boundaries = {
            operand: _walk_operand(o, layer, operand, limits[operand]) for operand in OPERANDS
        }
    else:
        boundaries = _walk_even(o, layer, chains, limits)

    return TemporalMapping(ordering=tuple(o), boundaries=boundaries, mode=AllocationMode(mode))


def _walk_operand(o: LoopOrdering, layer: LayerSpec, operand: OperandKind,
                  limits: List[Optional[int]]) -> Tuple[int, ...]:
    top = len(limits) - 1
    position = 0
    boundaries: List[int] = []
    sizes: Dict[str, int] = {}
    for t, loop in enumerate(o):
        sizes[loop.dim] = sizes.get(loop.dim, 1) * loop.factor
        footprint = tile_footprint(operand, sizes, layer)
        while position < top and not _fits(footprint, limits[position]):
            boundaries.append(t)
            position += 1
    boundaries.extend([len(o)] * (top - len(boundaries)))
    return tuple(boundaries)


def _walk_even(o: LoopOrdering, layer: LayerSpec, chains: Dict[OperandKind, List[int]],
               limits: Dict[OperandKind, List[Optional[int]]]) -> Dict[OperandKind, Tuple[int, ...]]:
    top = max(len(chain) for chain in chains.values()) - 1

    # operands with shorter chains stay at their top level once the pointer passes it
    def position(operand: OperandKind, pointer: int) -> int:
        return min(pointer, len(chains[operand]) - 1)

    pointer = 0
    shared: List[int] = []
    sizes: Dict[str, int] = {}
    for t, loop in enumerate(o):
        sizes[loop.dim] = sizes.get(loop.dim, 1) * loop.factor
        footprints = {operand: tile_footprint(operand, sizes, layer) for operand in OPERANDS}
        while pointer < top and any(
            not _fits(footprints[operand], limits[operand][position(operand, pointer)])
            for operand in OPERANDS
        ):
            shared.append(t)
            pointer += 1
    shared.extend([len(o)] * (top - len(shared)))

    return {operand: tuple(shared[:len(chain) - 1]) for operand, chain in chains.items()}


def level_segments(mapping: TemporalMapping, operand: OperandKind) -> List[Tuple[int, int]]:
    """Half-open loop index ranges held at each serving level of ``operand``, lowest first."""
    edges = [0, *mapping.boundaries[operand], len(mapping.ordering)]
    return [(edges[j], edges[j + 1]) for j in range(len(edges) - 1)]


def unique_layers(network: Sequence[LayerSpec]) -> List[Tuple[LayerSpec, int]]:
    """Group numerically identical layers, keeping first-occurrence order."""
    groups: Dict[tuple, List] = {}
    for layer in network:
        key = layer.shape_key()
        if key in groups:
            groups[key][1] += 1
        else:
            groups[key] = [layer, 1]
    return [(layer, count) for layer, count in groups.values()]
