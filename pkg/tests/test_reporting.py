"""
Tests for report building and file output.
"""

from src.models.arch import SpatialUnrolling
from src.models.mapping import AllocationMode, SaParams
from src.models.report import RunReport
from src.models.workload import LayerSpec
from src.services.engines import random_search, sa_search
from src.services.reporting import (
    build_run_report,
    csv_text,
    distribution_rows,
    serialize_report,
    write_text_atomic,
)

NONE = SpatialUnrolling()


def test_write_text_atomic_replaces_file(tmp_path):
    target = tmp_path / "nested" / "out.txt"
    write_text_atomic(str(target), "first\n")
    write_text_atomic(str(target), "second\n")
    assert target.read_text() == "second\n"
    assert [path.name for path in target.parent.iterdir()] == ["out.txt"]


def test_csv_text():
    assert csv_text(("a", "b"), [(1, "x"), (2, "y")]) == "a,b\n1,x\n2,y\n"


def test_run_report_contents(archs):
    layer = LayerSpec(name="mid", K=8, C=4, OY=4, OX=2)
    params = SaParams(iterations=40, seed=2)
    result = sa_search(layer, archs["eyeriss_mini"], NONE, AllocationMode.EVEN, params)
    report = build_run_report(layer, archs["eyeriss_mini"], result, params)

    assert report.engine_used == "sa" and report.mode == "even"
    assert len(report.ordering) == 8
    assert set(report.boundaries) == {"I", "W", "O"}
    assert report.total_energy == report.objective
    assert sum(row.energy for row in report.costs) + report.mac_energy == report.total_energy
    assert report.sa_params.seed == 2
    assert RunReport.model_validate_json(serialize_report(report)) == report


def test_distribution_rows(archs):
    layer = LayerSpec(name="mid", K=8, C=4, OY=4, OX=2)
    sa = sa_search(layer, archs["three_level"], NONE, AllocationMode.UNEVEN, SaParams(iterations=5))
    rnd = random_search(layer, archs["three_level"], NONE, AllocationMode.UNEVEN, samples=5, seed=0)
    rows = distribution_rows(sa, rnd, 5)
    assert [row[0] for row in rows] == ["sa"] * 5 + ["random"] * 5
    assert [row[1] for row in rows[:5]] == [0, 1, 2, 3, 4]
    assert all(row[3] in ("true", "false") for row in rows)
    assert all(row[3] == "false" for row in rows[5:])
