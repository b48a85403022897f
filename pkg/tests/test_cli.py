"""
Tests for the command-line interface.
"""

import json

import pytest

from src.main import main
from src.models.arch import SpatialUnrolling
from src.models.mapping import AllocationMode
from src.models.report import RunReport, SweepReport, ValidationReport
from src.services.allocator import unique_layers
from src.services.config_loader import dump_yaml, load_arch, load_layer, load_network
from src.services.fixtures import builtin_fixtures
from src.services.oracle import brute_force_best
from src.services.reporting import DISTRIBUTION_HEADER, load_run_report, serialize_report


@pytest.fixture
def paths(configs_dir):
    return {
        "toy": str(configs_dir / "layers" / "toy.yaml"),
        "mid": str(configs_dir / "layers" / "mid_layer.yaml"),
        "complex": str(configs_dir / "layers" / "complex_layer.yaml"),
        "eyeriss": str(configs_dir / "arch" / "eyeriss_like.yaml"),
        "three_level": str(configs_dir / "arch" / "three_level.yaml"),
        "k8": str(configs_dir / "spatial" / "k8.yaml"),
        "resnet": str(configs_dir / "networks" / "resnet_like.yaml"),
        "fixtures": str(configs_dir / "fixtures"),
    }


def test_schedule_exhaustive_finds_global_minimum(paths, tmp_path):
    out = tmp_path / "report.json"
    code = main(["schedule", "--layer", paths["toy"], "--arch", paths["eyeriss"],
                 "--engine", "exhaustive", "--out", str(out)])
    assert code == 0
    report = load_run_report(str(out))
    assert report.engine_used == "exhaustive"
    _, optimum = brute_force_best(load_layer(paths["toy"]), load_arch(paths["eyeriss"]),
                                  SpatialUnrolling(), AllocationMode.UNEVEN)
    assert report.objective == optimum
    assert report.distinct_orderings == "6"
    assert [record.upper for record in report.boundaries["W"]] == ["dram"]
    assert [record.lower for record in report.boundaries["I"]] == ["spad_I", "global_buffer"]


def test_schedule_auto_on_large_layer_uses_sa(paths, tmp_path):
    out = tmp_path / "report.json"
    code = main(["schedule", "--layer", paths["complex"], "--arch", paths["eyeriss"], "--spatial", paths["k8"],
                 "--iterations", "50", "--out", str(out)])
    assert code == 0
    report = load_run_report(str(out))
    assert report.engine_used == "sa"
    assert report.evaluations == 50
    assert int(report.distinct_orderings) > 10**9


def test_schedule_is_deterministic(paths, tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["schedule", "--layer", paths["mid"], "--arch", paths["eyeriss"], "--engine", "sa",
                     "--seed", "7", "--iterations", "80", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        data.pop("wall_time")
        reports.append(data)
    assert reports[0] == reports[1]
    assert reports[0]["sa_params"]["seed"] == 7


def test_report_round_trip(paths, tmp_path):
    out = tmp_path / "report.json"
    main(["schedule", "--layer", paths["mid"], "--arch", paths["three_level"], "--engine", "sa",
          "--iterations", "20", "--mode", "even", "--out", str(out)])
    report = load_run_report(str(out))
    assert RunReport.model_validate_json(serialize_report(report)) == report
    assert report.mode == "even"


def test_schedule_prints_to_stdout(paths, capsys):
    assert main(["schedule", "--layer", paths["toy"], "--arch", paths["three_level"], "--engine", "exhaustive"]) == 0
    report = RunReport.model_validate_json(capsys.readouterr().out)
    assert report.layer == "toy"


def test_config_errors_exit_2(paths, tmp_path):
    layer = tmp_path / "layer.yaml"
    layer.write_text("name: typo\nK: 4\nCC: 4\n")
    assert main(["schedule", "--layer", str(layer), "--arch", paths["three_level"]]) == 2

    arch = tmp_path / "arch.yaml"
    arch.write_text(dump_yaml({
        "name": "bad", "pe_rows": 1, "pe_cols": 1, "mac_energy": 1.0,
        "levels": [{"name": "reg", "capacity_bits": 64, "read_energy": 1.0, "write_energy": 1.0,
                    "serves": ["I", "W", "O"], "shared": False}],
    }))
    assert main(["schedule", "--layer", paths["toy"], "--arch", str(arch)]) == 2
    # K=4 is not divisible by the 8-way unrolling
    assert main(["schedule", "--layer", paths["toy"], "--arch", paths["eyeriss"], "--spatial", paths["k8"]]) == 2


def test_spatial_error_names_spatial_file(paths, tmp_path, caplog):
    spatial = tmp_path / "too_wide.yaml"
    spatial.write_text("- {dim: K, factor: 16, axis: row}\n")
    assert main(["schedule", "--layer", paths["complex"], "--arch", paths["eyeriss"],
                 "--spatial", str(spatial)]) == 2
    errors = [record.getMessage() for record in caplog.records if record.levelname == "ERROR"]
    assert any(f"{spatial}: SpatialRowOverflow" in message for message in errors)
    assert not any(paths["eyeriss"] in message for message in errors)


def test_invalid_environment_exit_2(paths, monkeypatch):
    monkeypatch.setenv("MAPSEARCH_SA_RHO", "1.5")
    assert main(["schedule", "--layer", paths["toy"], "--arch", paths["three_level"]]) == 2


def test_space_too_large_exit_3(paths, tmp_path):
    code = main(["schedule", "--layer", paths["complex"], "--arch", paths["eyeriss"],
                 "--engine", "exhaustive", "--out", str(tmp_path / "r.json")])
    assert code == 3
    assert not (tmp_path / "r.json").exists()


def test_sweep_totals_by_multiplicity(paths, tmp_path):
    network = tmp_path / "net.yaml"
    network.write_text(
        "- {name: l1, K: 4, C: 4}\n"
        "- {name: l1_again, K: 4, C: 4}\n"
        "- {name: l2, K: 2, C: 8}\n"
    )
    out = tmp_path / "sweep.json"
    assert main(["sweep", "--network", str(network), "--arch", paths["three_level"],
                 "--engine", "exhaustive", "--out", str(out)]) == 0
    sweep = SweepReport.model_validate_json(out.read_text())
    assert (sweep.total_layers, sweep.unique_layers) == (3, 2)
    assert [entry.multiplicity for entry in sweep.entries] == [2, 1]
    e1, e2 = (entry.report.objective for entry in sweep.entries)
    assert sweep.total_energy == pytest.approx(2 * e1 + e2)


def test_sweep_empty_network(paths, tmp_path):
    network = tmp_path / "empty.yaml"
    network.write_text("[]\n")
    out = tmp_path / "sweep.json"
    assert main(["sweep", "--network", str(network), "--arch", paths["three_level"], "--out", str(out)]) == 0
    sweep = SweepReport.model_validate_json(out.read_text())
    assert sweep.entries == [] and sweep.total_energy == 0.0


def test_shipped_resnet_has_repeated_shapes(paths):
    network = load_network(paths["resnet"])
    assert len(network) == 37
    assert len(unique_layers(network)) == 12


def test_distribution_file(paths, tmp_path):
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for out in outs:
        assert main(["distribution", "--layer", paths["mid"], "--arch", paths["three_level"],
                     "--samples", "60", "--seed", "3", "--out", str(out)]) == 0
    text = outs[0].read_text()
    assert text == outs[1].read_text()
    lines = text.splitlines()
    assert lines[0] == ",".join(DISTRIBUTION_HEADER)
    assert len(lines) == 1 + 2 * 60
    assert sum(line.startswith("sa,") for line in lines) == 60
    assert sum(line.startswith("random,") for line in lines) == 60


def test_distribution_single_ordering_layer(paths, tmp_path):
    """A one-loop layer still gets one annealing row per sample."""
    layer = tmp_path / "k2.yaml"
    layer.write_text("name: k2\nK: 2\n")
    out = tmp_path / "k2.csv"
    assert main(["distribution", "--layer", str(layer), "--arch", paths["three_level"],
                 "--samples", "10", "--seed", "0", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 * 10
    sa_lines = [line for line in lines if line.startswith("sa,")]
    assert len(sa_lines) == 10
    assert len({line.split(",")[2] for line in sa_lines}) == 1
    assert all(line.endswith(",true") for line in sa_lines)


def test_validate_builtin_and_shipped(paths, tmp_path):
    out = tmp_path / "validation.json"
    assert main(["validate", "--out", str(out)]) == 0
    report = ValidationReport.model_validate_json(out.read_text())
    assert report.passed and report.checks == 6 * len(builtin_fixtures())
    assert main(["validate", "--fixtures", paths["fixtures"], "--out", str(out)]) == 0


def test_validate_random_is_deterministic(tmp_path):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for out in outs:
        assert main(["validate", "--random", "100", "--seed", "1", "--out", str(out)]) == 0
    assert outs[0].read_text() == outs[1].read_text()
    assert ValidationReport.model_validate_json(outs[0].read_text()).checks == 100


def test_validate_corrupted_expectation_fails(tmp_path):
    fixture = builtin_fixtures()[0]
    data = fixture.to_config()
    data["expected"] = {
        "distinct_orderings": 6,
        "optimal_objective": 1.0,
        "canonical_accesses": [{"operand": "W", "level": "reg", "reads": 999, "writes": 0, "energy": 0.0}],
    }
    directory = tmp_path / "fixtures"
    directory.mkdir()
    (directory / "corrupt.yaml").write_text(dump_yaml(data))
    out = tmp_path / "validation.json"
    assert main(["validate", "--fixtures", str(directory), "--out", str(out)]) == 1
    report = ValidationReport.model_validate_json(out.read_text())
    assert not report.passed
    assert report.cases[0].mismatches[0][:3] == ("W", "reg", "read")
    assert report.cases[0].counts


def test_study_table(tmp_path):
    fixture = builtin_fixtures()[0]
    directory = tmp_path / "fixtures"
    directory.mkdir()
    (directory / "one.yaml").write_text(dump_yaml(fixture.to_config()))
    out = tmp_path / "study.csv"
    assert main(["study", "--fixtures", str(directory), "--runs", "3", "--iterations", "30",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "fixture,distinct_orderings,optimum,runs,hit_rate,mean_excess"
    assert lines[1].startswith(f"{fixture.name},6,")
    assert lines[-1].startswith("ALL,")
