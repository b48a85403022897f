"""
Architecture service: hierarchy invariants, operand serving chains and
spatial multicast factors.
"""

from typing import List, Tuple

from src.models.arch import ArchSpec, ArchViolation, Axis, SpatialUnrolling
from src.models.workload import OPERANDS, OperandKind
from src.services.workload import operand_relevance
from src.utils.logger import get_logger

logger = get_logger(__name__)


def operand_chain(arch: ArchSpec, operand: OperandKind) -> List[int]:
    """Indices of the levels serving ``operand``, lowest first."""
    return [index for index, level in enumerate(arch.levels) if operand in level.serves]


def validate_arch(arch: ArchSpec) -> List[ArchViolation]:
    """Return every broken hierarchy invariant; an empty list means valid."""
    violations: List[ArchViolation] = []
    levels = arch.levels

    if not levels:
        return [ArchViolation(code="NoLevels", message="hierarchy has no memory levels")]

    names = [level.name for level in levels]
    for name in sorted({name for name in names if names.count(name) > 1}):
        violations.append(ArchViolation(code="DuplicateLevelName", message=f"level name '{name}' repeats"))

    top = len(levels) - 1
    if not levels[top].unbounded:
        violations.append(ArchViolation(
            code="TopLevelBounded", message=f"top level '{levels[top].name}' must be unbounded"
        ))
    for index, level in enumerate(levels[:-1]):
        if level.unbounded:
            violations.append(ArchViolation(
                code="InnerLevelUnbounded", message=f"level {index} '{level.name}' is unbounded but not topmost"
            ))

    for level in levels:
        if not level.serves:
            violations.append(ArchViolation(code="EmptyServes", message=f"level '{level.name}' serves no operand"))

    for operand in OPERANDS:
        chain = operand_chain(arch, operand)
        if not chain:
            violations.append(ArchViolation(
                code="OperandUnserved", message=f"no level serves operand {operand.value}"
            ))
            continue
        if chain[-1] != top:
            violations.append(ArchViolation(
                code="OperandNotAtTop",
                message=f"operand {operand.value} chain ends at '{levels[chain[-1]].name}', not the top level",
            ))
        seen_shared = False
        for index in chain:
            if levels[index].shared:
                seen_shared = True
            elif seen_shared:
                violations.append(ArchViolation(
                    code="PerPeAboveShared",
                    message=f"per-PE level '{levels[index].name}' sits above a shared level in the "
                            f"{operand.value} chain",
                ))

    for violation in violations:
        logger.debug(f"Architecture {arch.name}: {violation.code}: {violation.message}")
    return violations


def validate_spatial(arch: ArchSpec, spatial: SpatialUnrolling) -> List[ArchViolation]:
    """Check the unrolling fits the PE array."""
    violations = []
    rows = spatial.axis_product(Axis.ROW)
    cols = spatial.axis_product(Axis.COL)
    if rows > arch.pe_rows:
        violations.append(ArchViolation(
            code="SpatialRowOverflow", message=f"row unrolling {rows} exceeds {arch.pe_rows} PE rows"
        ))
    if cols > arch.pe_cols:
        violations.append(ArchViolation(
            code="SpatialColOverflow", message=f"column unrolling {cols} exceeds {arch.pe_cols} PE columns"
        ))
    dims = [entry.dim for entry in spatial.entries]
    for dim in sorted({dim for dim in dims if dims.count(dim) > 1}):
        logger.warning(f"Spatial unrolling splits {dim} over several entries")
    return violations


def spatial_scale(operand: OperandKind, spatial: SpatialUnrolling) -> Tuple[int, int]:
    """
    Spatial replication of an operand.

    Returns:
        (p_total, reuse): the number of PEs used and how many of them share
        each word of the operand (product of operand-irrelevant factors).
    """
    p_total = 1
    reuse = 1
    for entry in spatial.entries:
        p_total *= entry.factor
        if not operand_relevance(entry.dim, operand):
            reuse *= entry.factor
    return p_total, reuse
