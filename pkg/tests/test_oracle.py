"""
Tests for the loop-nest simulation oracle and cost-model equivalence.
"""

import pytest

from src.models.arch import SpatialUnrolling
from src.models.mapping import AllocationMode
from src.models.workload import LayerSpec, Loop, OperandKind
from src.services.allocator import allocate
from src.services.cost_model import evaluate
from src.services.fixtures import builtin_fixtures, check_ordering, random_fixtures, validate_fixture
from src.services.oracle import brute_force_best, diff_accesses, simulate
from src.services.ordering import canonical_ordering, generate_orderings
from src.services.workload import lpf_decompose, total_macs
from src.utils.errors import BudgetExceeded, SpaceTooLarge

NONE = SpatialUnrolling()


def test_builtin_fixtures_match_simulation():
    """Canonical plus five random orderings on each of the 20 built-in fixtures."""
    fixtures = builtin_fixtures()
    assert len(fixtures) >= 20
    cases = [case for fixture in fixtures for case in validate_fixture(fixture, seed=1)]
    assert len(cases) == 6 * len(fixtures)
    failed = [case for case in cases if not case.passed]
    assert failed == [], failed[:1]


def test_random_fixtures_match_simulation():
    cases = [check_ordering(fixture, ordering, fixture.name) for fixture, ordering in random_fixtures(100, seed=1)]
    failed = [case for case in cases if not case.passed]
    assert failed == [], failed[:1]


def test_every_ordering_of_a_small_layer_matches(archs):
    layer = LayerSpec(name="conv", K=2, C=3, OY=2, OX=2, FX=3, stride_x=2)
    for name in ("three_level", "eyeriss_mini"):
        arch = archs[name]
        for mode in AllocationMode:
            for ordering in generate_orderings(lpf_decompose(layer, NONE)):
                mapping = allocate(ordering, layer, arch, NONE, mode)
                predicted = evaluate(mapping, layer, arch, NONE).accesses
                assert diff_accesses(predicted, simulate(mapping, layer, arch).accesses) == []


def test_simulation_counts_every_mac(archs, toy_layer):
    arch = archs["two_level"]
    mapping = allocate(canonical_ordering(lpf_decompose(toy_layer, NONE)), toy_layer, arch, NONE,
                       AllocationMode.UNEVEN)
    trace = simulate(mapping, toy_layer, arch)
    assert trace.iterations_executed == total_macs(toy_layer)
    assert trace.accesses[(OperandKind.W, "reg", "read")] == 16
    assert trace.accesses[(OperandKind.O, "dram", "write")] == 4


def test_simulation_budget(archs, toy_layer):
    arch = archs["two_level"]
    mapping = allocate(canonical_ordering(lpf_decompose(toy_layer, NONE)), toy_layer, arch, NONE,
                       AllocationMode.UNEVEN)
    with pytest.raises(BudgetExceeded):
        simulate(mapping, toy_layer, arch, budget=15)


def test_simulation_needs_full_temporal_mapping(archs, toy_layer):
    arch = archs["two_level"]
    mapping = allocate((Loop("K", 2), Loop("C", 2)), toy_layer, arch, NONE, AllocationMode.UNEVEN)
    with pytest.raises(ValueError):
        simulate(mapping, toy_layer, arch)


def test_diff_accesses_reports_both_sides():
    key = (OperandKind.I, "reg", "read")
    other = (OperandKind.W, "reg", "read")
    assert diff_accesses({key: 3}, {key: 3}) == []
    assert diff_accesses({key: 3}, {key: 4, other: 1}) == [(key, 3, 4), (other, 0, 1)]


def test_brute_force_best_is_global_minimum(archs, toy_layer):
    arch = archs["three_level"]
    mapping, best = brute_force_best(toy_layer, arch, NONE, AllocationMode.UNEVEN)
    for ordering in generate_orderings(lpf_decompose(toy_layer, NONE)):
        value = evaluate(allocate(ordering, toy_layer, arch, NONE, AllocationMode.UNEVEN), toy_layer, arch, NONE)
        assert best <= value.total_energy
    assert evaluate(mapping, toy_layer, arch, NONE).total_energy == best


def test_brute_force_limit(archs):
    layer = LayerSpec(name="big", K=64, C=64)
    with pytest.raises(SpaceTooLarge):
        brute_force_best(layer, archs["two_level"], NONE, AllocationMode.UNEVEN, limit=100)
