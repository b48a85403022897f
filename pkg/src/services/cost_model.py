"""
Analytical cost model: per-boundary data traffic, per-level access counts
and total energy of a temporal mapping.
"""

from typing import Dict, Tuple

from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.mapping import (
    READ,
    WRITE,
    AccessKey,
    CostBreakdown,
    EnergyKey,
    Metric,
    TemporalMapping,
)
from src.models.workload import OPERANDS, LayerSpec, OperandKind
from src.services.archspec import operand_chain, spatial_scale
from src.services.workload import RELEVANT_DIMS, output_elements, tile_footprint, total_macs
from src.utils.errors import UnsupportedMetric


def boundary_traffic(mapping: TemporalMapping, operand: OperandKind, boundary: int,
                     layer: LayerSpec, spatial: SpatialUnrolling) -> Tuple[int, int]:
    """
    Words crossing the ``boundary``-th transition of an operand's serving chain.

    The tile below the boundary is refreshed once per iteration of the loops
    above it, except for the innermost run of operand-irrelevant loops, which
    keep the resident tile. Outputs are written back on every refresh and
    read back on every refresh but the first visit of each distinct tile.

    Returns:
        (words_moved_down, words_moved_up)
    """
    split = mapping.boundaries[operand][boundary]
    relevant = RELEVANT_DIMS[operand]

    sizes: Dict[str, int] = {}
    for loop in mapping.ordering[:split]:
        sizes[loop.dim] = sizes.get(loop.dim, 1) * loop.factor
    tile = tile_footprint(operand, sizes, layer)

    above_total = 1
    stationary = 1
    relevant_total = 1
    in_prefix = True
    for loop in mapping.ordering[split:]:
        above_total *= loop.factor
        if loop.dim in relevant:
            relevant_total *= loop.factor
            in_prefix = False
        elif in_prefix:
            stationary *= loop.factor
    refreshes = above_total // stationary

    p_total, reuse = spatial_scale(operand, spatial)
    copies = p_total // reuse

    if operand == OperandKind.O:
        return tile * (refreshes - relevant_total) * copies, tile * refreshes * copies
    return tile * refreshes * copies, 0


def evaluate(mapping: TemporalMapping, layer: LayerSpec, arch: ArchSpec,
             spatial: SpatialUnrolling) -> CostBreakdown:
    """Access counts and energy of a mapping; deterministic."""
    mac_count = total_macs(layer)
    accesses: Dict[AccessKey, int] = {}
    energy_terms: Dict[EnergyKey, float] = {}

    for operand in OPERANDS:
        chain = operand_chain(arch, operand)
        names = [arch.levels[index].name for index in chain]
        for name in names:
            accesses[(operand, name, READ)] = 0
            accesses[(operand, name, WRITE)] = 0

        lowest = names[0]
        if operand == OperandKind.O:
            accesses[(operand, lowest, WRITE)] += mac_count
            accesses[(operand, lowest, READ)] += mac_count - output_elements(layer)
        else:
            accesses[(operand, lowest, READ)] += mac_count

        for boundary in range(len(chain) - 1):
            down, up = boundary_traffic(mapping, operand, boundary, layer, spatial)
            lower, upper = names[boundary], names[boundary + 1]
            accesses[(operand, upper, READ)] += down
            accesses[(operand, lower, WRITE)] += down
            accesses[(operand, lower, READ)] += up
            accesses[(operand, upper, WRITE)] += up

        for index, name in zip(chain, names):
            level = arch.levels[index]
            energy_terms[(operand, name)] = (
                accesses[(operand, name, READ)] * level.read_energy
                + accesses[(operand, name, WRITE)] * level.write_energy
            )

    mac_energy_total = mac_count * arch.mac_energy
    total_energy = mac_energy_total + sum(energy_terms.values())
    return CostBreakdown(
        mac_count=mac_count,
        accesses=accesses,
        energy_terms=energy_terms,
        mac_energy_total=mac_energy_total,
        total_energy=total_energy,
    )


def objective(cb: CostBreakdown, metric: Metric = Metric.ENERGY) -> float:
    """The scalar the search engines minimize."""
    metric = Metric(metric)
    if metric != Metric.ENERGY:
        raise UnsupportedMetric(f"Metric '{metric.value}' is reserved; only energy is available")
    return cb.total_energy
