"""
Report building and file output.
All files are written atomically: to a temporary sibling, then renamed.
"""

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from src.models.arch import ArchSpec
from src.models.mapping import READ, WRITE, CostBreakdown, SaParams, SearchResult, TemporalMapping
from src.models.report import BoundaryRecord, CostRow, RunReport, SaParamsEcho
from src.models.workload import OPERANDS, LayerSpec
from src.services.archspec import operand_chain
from src.utils.logger import get_logger

logger = get_logger(__name__)

DISTRIBUTION_HEADER = ("strategy", "iteration", "objective", "accepted")


def boundary_records(mapping: TemporalMapping, arch: ArchSpec) -> dict:
    records = {}
    for operand in OPERANDS:
        names = [arch.levels[index].name for index in operand_chain(arch, operand)]
        records[operand.value] = [
            BoundaryRecord(lower=names[j], upper=names[j + 1], position=position)
            for j, position in enumerate(mapping.boundaries[operand])
        ]
    return records


def cost_rows(cost: CostBreakdown) -> List[CostRow]:
    return [
        CostRow(
            operand=operand.value,
            level=level,
            reads=cost.accesses.get((operand, level, READ), 0),
            writes=cost.accesses.get((operand, level, WRITE), 0),
            energy=energy,
        )
        for (operand, level), energy in cost.energy_terms.items()
    ]


def build_run_report(layer: LayerSpec, arch: ArchSpec, result: SearchResult, params: SaParams,
                     lpf_limit: Optional[int] = None) -> RunReport:
    mapping = result.best_mapping
    return RunReport(
        layer=layer.name,
        engine_used=result.engine_used.value,
        mode=mapping.mode.value,
        ordering=[(loop.dim, loop.factor) for loop in mapping.ordering],
        boundaries=boundary_records(mapping, arch),
        costs=cost_rows(result.best_cost),
        mac_count=result.best_cost.mac_count,
        mac_energy=result.best_cost.mac_energy_total,
        total_energy=result.best_cost.total_energy,
        objective=result.best_objective,
        evaluations=result.evaluations,
        distinct_orderings=str(result.distinct_orderings),
        lpf_limit=lpf_limit,
        wall_time=result.wall_time,
        sa_params=SaParamsEcho(**params.model_dump()),
    )


def serialize_report(report) -> str:
    return report.model_dump_json(indent=2) + "\n"


def load_run_report(path: str) -> RunReport:
    return RunReport.model_validate_json(Path(path).read_text())


def write_text_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via write-then-rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(temp_name, target)
    except Exception:
        Path(temp_name).unlink(missing_ok=True)
        raise
    logger.debug(f"Wrote {target}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def distribution_rows(sa_result: SearchResult, random_result: SearchResult, samples: int) -> List[tuple]:
    """
    Rows of the energy-distribution table: ``samples`` annealing candidates,
    then ``samples`` random orderings.

    A single-ordering space has no annealing trace; every candidate there is
    the one ordering and is accepted, so its objective is repeated.
    """
    sa_rows = [
        (entry.iteration, repr(entry.objective), "true" if entry.accepted else "false")
        for entry in sa_result.trace or []
    ]
    if not sa_rows:
        sa_rows = [(iteration, repr(sa_result.best_objective), "true") for iteration in range(samples)]
    random_rows = [(entry.iteration, repr(entry.objective), "false") for entry in random_result.trace or []]
    return [("sa", *row) for row in sa_rows] + [("random", *row) for row in random_rows]
