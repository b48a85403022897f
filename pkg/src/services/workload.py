"""
Workload service: operand relevance, loop prime factor decomposition,
LPF limiting and operand tile footprints.
"""

from typing import Dict, FrozenSet, List, Mapping, Sequence

from src.models.arch import SpatialUnrolling
from src.models.workload import DIM_RANK, DIMS, LayerSpec, Loop, Lpf, OperandKind
from src.utils.errors import NonDivisibleUnrolling
from src.utils.logger import get_logger

logger = get_logger(__name__)

RELEVANT_DIMS: Dict[OperandKind, FrozenSet[str]] = {
    OperandKind.W: frozenset({"K", "C", "FY", "FX"}),
    OperandKind.O: frozenset({"B", "K", "OY", "OX"}),
    OperandKind.I: frozenset({"B", "C", "OY", "OX", "FY", "FX"}),
}


def operand_relevance(dim: str, operand: OperandKind) -> bool:
    """Whether loop dimension ``dim`` indexes the operand's tensor."""
    if dim not in DIM_RANK:
        raise ValueError(f"Unknown loop dimension: {dim}")
    return dim in RELEVANT_DIMS[operand]


def prime_factors(n: int) -> List[int]:
    """Prime factorization by trial division, ascending. 1 has no factors."""
    factors = []
    divisor = 2
    while divisor * divisor <= n:
        while n % divisor == 0:
            factors.append(divisor)
            n //= divisor
        divisor += 1
    if n > 1:
        factors.append(n)
    return factors


def temporal_sizes(layer: LayerSpec, spatial: SpatialUnrolling) -> Dict[str, int]:
    """Per-dimension size left for temporal loops once spatial factors are taken out."""
    sizes = {}
    for dim in DIMS:
        size = layer.dim_size(dim)
        unrolled = spatial.factor_of(dim)
        if size % unrolled != 0:
            raise NonDivisibleUnrolling(
                f"Layer {layer.name}: spatial factor {unrolled} does not divide {dim}={size}"
            )
        sizes[dim] = size // unrolled
    return sizes


def lpf_decompose(layer: LayerSpec, spatial: SpatialUnrolling) -> List[Lpf]:
    """Decompose every temporal dimension into its prime factors, in canonical order."""
    lpfs = []
    for dim, size in temporal_sizes(layer, spatial).items():
        lpfs.extend(Loop(dim, factor) for factor in prime_factors(size))
    return lpfs


def limit_lpfs(lpfs: Sequence[Loop], max_n: int) -> List[Loop]:
    """
    Coarsen an LPF list to at most ``max_n`` loops.

    Repeatedly merges the two smallest factors of one dimension, picking the
    dimension whose merged product is smallest (earliest dimension on ties).
    Merged loops may be composite. Stops early once no dimension has two loops.
    """
    loops = list(lpfs)
    while len(loops) > max_n:
        best = None
        for dim in DIMS:
            positions = sorted(
                (index for index, loop in enumerate(loops) if loop.dim == dim),
                key=lambda index: loops[index].factor,
            )
            if len(positions) < 2:
                continue
            first, second = positions[0], positions[1]
            product = loops[first].factor * loops[second].factor
            if best is None or product < best[0]:
                best = (product, first, second)
        if best is None:
            logger.debug(f"LPF limit {max_n} unreachable, stopping at {len(loops)} loops")
            break
        product, first, second = best
        keep, drop = min(first, second), max(first, second)
        loops[keep] = Loop(loops[keep].dim, product)
        del loops[drop]
    return loops


def dim_products(loops: Sequence[Loop]) -> Dict[str, int]:
    products = {dim: 1 for dim in DIMS}
    for loop in loops:
        products[loop.dim] *= loop.factor
    return products


def tile_footprint(operand: OperandKind, tile_sizes: Mapping[str, int], layer: LayerSpec) -> int:
    """Words of an operand touched by a tile; absent dimensions count as 1."""
    size = tile_sizes.get
    if operand == OperandKind.W:
        return size("K", 1) * size("C", 1) * size("FY", 1) * size("FX", 1)
    if operand == OperandKind.O:
        return size("B", 1) * size("K", 1) * size("OY", 1) * size("OX", 1)
    iy = layer.stride_y * (size("OY", 1) - 1) + size("FY", 1)
    ix = layer.stride_x * (size("OX", 1) - 1) + size("FX", 1)
    return size("B", 1) * size("C", 1) * iy * ix


def total_macs(layer: LayerSpec) -> int:
    total = 1
    for dim in DIMS:
        total *= layer.dim_size(dim)
    return total


def output_elements(layer: LayerSpec) -> int:
    """Distinct output words of the full layer."""
    return layer.b * layer.k * layer.oy * layer.ox
