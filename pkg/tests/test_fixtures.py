"""
Tests for the curated fixtures and the optimality study.
"""

import pytest

from src.models.arch import SpatialUnrolling
from src.models.mapping import AllocationMode, SaParams
from src.models.workload import OPERANDS, LayerSpec
from src.services.fixtures import (
    Fixture,
    builtin_fixtures,
    is_hit,
    optimality_study,
    random_fixtures,
    study_fixtures,
    toy_architectures,
)
from src.services.archspec import operand_chain, validate_arch
from src.services.ordering import count_distinct_orderings
from src.services.workload import lpf_decompose, total_macs
from src.utils.errors import SpaceTooLarge

NONE = SpatialUnrolling()


def test_builtin_fixtures_are_oracle_sized():
    fixtures = builtin_fixtures()
    assert len(fixtures) == 20
    assert len({fixture.name for fixture in fixtures}) == 20
    assert {fixture.mode for fixture in fixtures} == set(AllocationMode)
    for fixture in fixtures:
        assert total_macs(fixture.layer) <= 10**4
        assert all(2 <= len(operand_chain(fixture.arch, operand)) <= 3 for operand in OPERANDS)
        assert fixture.spatial.entries == ()


def test_toy_architectures_are_valid():
    for arch in toy_architectures().values():
        assert validate_arch(arch) == []


def test_study_fixtures_space_sizes():
    sizes = [count_distinct_orderings(lpf_decompose(f.layer, f.spatial)) for f in study_fixtures()]
    assert sizes == [1680, 1680, 1260, 1260, 1260, 1260, 15120, 15120]
    assert all(10**3 <= size <= 10**5 for size in sizes)


def test_random_fixtures_are_deterministic():
    a = random_fixtures(10, seed=4)
    b = random_fixtures(10, seed=4)
    assert [(f.to_config(), o) for f, o in a] == [(f.to_config(), o) for f, o in b]


def test_fixture_config_round_trip():
    for fixture in builtin_fixtures()[:4]:
        assert Fixture.model_validate(fixture.to_config()) == fixture


def test_fixture_accepts_spatial_list():
    fixture = builtin_fixtures()[0]
    data = fixture.to_config()
    data["spatial"] = [{"dim": "K", "factor": 2, "axis": "row"}]
    assert Fixture.model_validate(data).spatial.factor_of("K") == 2


def test_is_hit_tolerance():
    assert is_hit(100.0, 100.0)
    assert is_hit(100.0 * (1 + 1e-14), 100.0)
    assert not is_hit(100.001, 100.0)


def test_single_ordering_study_is_perfect():
    arch = toy_architectures()["two_level"]
    fixture = Fixture(name="k2", layer=LayerSpec(name="k2", K=2), arch=arch)
    result = optimality_study([fixture], runs=5, base_seed=0, params=SaParams(iterations=10))
    assert result.hit_rate == 1.0
    assert result.mean_excess == 0.0
    assert result.rows[0].runs == 5


def test_study_rejects_large_spaces():
    arch = toy_architectures()["two_level"]
    fixture = Fixture(name="big", layer=LayerSpec(name="big", K=64, C=64, OY=16), arch=arch)
    with pytest.raises(SpaceTooLarge):
        optimality_study([fixture], runs=1, base_seed=0)


def test_study_is_reproducible():
    fixture = study_fixtures()[2]
    params = SaParams(iterations=100)
    a = optimality_study([fixture], runs=3, base_seed=9, params=params)
    b = optimality_study([fixture], runs=3, base_seed=9, params=params)
    assert (a.hit_rate, a.mean_excess) == (b.hit_rate, b.mean_excess)
    assert a.mean_excess >= 0.0


@pytest.mark.slow
def test_sa_optimality_study():
    """Default annealing finds the brute-force optimum in at least 95% of runs."""
    result = optimality_study(study_fixtures(), runs=100, base_seed=0, params=SaParams())
    assert result.hit_rate >= 0.95
    assert result.mean_excess <= 0.001
