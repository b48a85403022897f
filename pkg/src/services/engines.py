"""
Dual-engine search: exhaustive enumeration of distinct loop orderings,
simulated annealing over the swap neighborhood, and the runtime estimate
that picks between them.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.mapping import (
    AllocationMode,
    CostBreakdown,
    EngineKind,
    LoopOrdering,
    Metric,
    SaParams,
    SearchResult,
    TemporalMapping,
    TraceEntry,
)
from src.models.workload import LayerSpec, Loop
from src.services.allocator import allocate
from src.services.cost_model import evaluate, objective
from src.services.ordering import (
    canonical_ordering,
    count_distinct_orderings,
    generate_orderings,
    random_ordering,
    sample_swap,
)
from src.services.workload import limit_lpfs, lpf_decompose
from src.utils.errors import NonPositiveInput, SpaceTooLarge
from src.utils.logger import get_logger
from src.utils.rng import SeededRNG

logger = get_logger(__name__)

DEFAULT_EXHAUSTIVE_CAP = 10**8
BATCHES_PER_WORKER = 4


@dataclass(frozen=True)
class SearchProblem:
    """Everything needed to turn an ordering into an objective value."""

    layer: LayerSpec
    arch: ArchSpec
    spatial: SpatialUnrolling
    mode: AllocationMode
    metric: Metric = Metric.ENERGY

    def cost(self, ordering: LoopOrdering) -> Tuple[TemporalMapping, CostBreakdown, float]:
        mapping = allocate(ordering, self.layer, self.arch, self.spatial, self.mode)
        breakdown = evaluate(mapping, self.layer, self.arch, self.spatial)
        return mapping, breakdown, objective(breakdown, self.metric)

    def lpfs(self, lpf_limit: Optional[int] = None) -> List[Loop]:
        lpfs = lpf_decompose(self.layer, self.spatial)
        if lpf_limit is not None:
            lpfs = limit_lpfs(lpfs, lpf_limit)
        return lpfs


def acceptance_probability(v: float, v_new: float, t: float) -> float:
    """Metropolis acceptance on the cost ratio: min(1, exp((v / v_new - 1) / t))."""
    if v <= 0 or v_new <= 0 or t <= 0:
        raise NonPositiveInput(f"acceptance needs positive inputs, got v={v}, v_new={v_new}, t={t}")
    exponent = (v / v_new - 1.0) / t
    if exponent >= 0:
        return 1.0
    return math.exp(exponent)


def cooling_step(t: float, rho: float) -> float:
    return rho * t


# Simulated annealing

@dataclass
class _ChainResult:
    best_ordering: LoopOrdering
    best_objective: float
    initial_objective: float
    trace: List[TraceEntry]


def _run_chain(problem: SearchProblem, lpfs: Sequence[Loop], params: SaParams, chain: int) -> _ChainResult:
    """
    One annealing chain with its own stream; draws per iteration are i, j, then
    the acceptance uniform. The best is the minimum over the chain's
    candidates, which are all in its trace.
    """
    rng = SeededRNG(params.seed + chain)
    if params.initial == "canonical":
        current = canonical_ordering(lpfs)
    else:
        current = random_ordering(lpfs, rng)
    _, _, current_value = problem.cost(current)

    initial_value = current_value
    best, best_value = current, math.inf
    trace: List[TraceEntry] = []
    temperature = params.t0
    for iteration in range(params.iterations):
        candidate, _, _ = sample_swap(current, rng)
        _, _, value = problem.cost(candidate)
        accepted = rng.random() < acceptance_probability(current_value, value, temperature)
        if accepted:
            current, current_value = candidate, value
        if value < best_value:
            best, best_value = candidate, value
        trace.append(TraceEntry(chain, iteration, value, accepted, temperature))
        temperature = cooling_step(temperature, params.rho)
    return _ChainResult(best, best_value, initial_value, trace)


def _run_chain_task(args) -> _ChainResult:
    return _run_chain(*args)


def sa_search(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling, mode: AllocationMode,
              params: SaParams, lpf_limit: Optional[int] = None, workers: int = 1,
              metric: Metric = Metric.ENERGY) -> SearchResult:
    """
    Simulated annealing over loop orderings; returns the best mapping visited.

    Restart chains are seeded ``seed + chain`` and merged in chain order, so
    the result does not depend on ``workers``.
    """
    problem = SearchProblem(layer, arch, spatial, AllocationMode(mode), metric)
    lpfs = problem.lpfs(lpf_limit)
    distinct = count_distinct_orderings(lpfs)
    start = time.perf_counter()

    if distinct == 1:
        ordering = canonical_ordering(lpfs)
        mapping, breakdown, value = problem.cost(ordering)
        logger.debug(f"Layer {layer.name}: single ordering, annealing skipped")
        return SearchResult(
            best_mapping=mapping, best_cost=breakdown, best_objective=value,
            engine_used=EngineKind.SA, evaluations=1, wall_time=time.perf_counter() - start,
            distinct_orderings=distinct, trace=[], initial_objectives=[value],
        )

    tasks = [(problem, lpfs, params, chain) for chain in range(params.restarts)]
    if workers > 1 and params.restarts > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chains = list(executor.map(_run_chain_task, tasks))
    else:
        chains = [_run_chain_task(task) for task in tasks]

    winner = min(range(len(chains)), key=lambda index: (chains[index].best_objective, index))
    mapping, breakdown, value = problem.cost(chains[winner].best_ordering)
    trace = [entry for chain in chains for entry in chain.trace]
    wall_time = time.perf_counter() - start
    logger.info(
        f"SA on {layer.name}: {params.restarts} chain(s) x {params.iterations} iterations, "
        f"best {value:.6g} in {wall_time:.3f}s"
    )
    return SearchResult(
        best_mapping=mapping, best_cost=breakdown, best_objective=value,
        engine_used=EngineKind.SA, evaluations=params.restarts * params.iterations,
        wall_time=wall_time, distinct_orderings=distinct, trace=trace,
        initial_objectives=[chain.initial_objective for chain in chains],
    )


# Exhaustive search

def _scan_range(problem: SearchProblem, lpfs: Sequence[Loop], start: int, stop: int) -> Tuple[int, float]:
    """Best (rank, objective) within a rank range; first rank wins ties."""
    best_rank, best_value = -1, math.inf
    for rank, ordering in enumerate(generate_orderings(lpfs, start, stop), start):
        _, _, value = problem.cost(ordering)
        if value < best_value:
            best_rank, best_value = rank, value
    return best_rank, best_value


def _scan_range_task(args) -> Tuple[int, float]:
    return _scan_range(*args)


def exhaustive_search(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling, mode: AllocationMode,
                      lpf_limit: Optional[int] = None, cap: int = DEFAULT_EXHAUSTIVE_CAP,
                      workers: int = 1, metric: Metric = Metric.ENERGY) -> SearchResult:
    """
    Evaluate every distinct ordering (of the LPF-limited list when given).

    Raises:
        SpaceTooLarge: more than ``cap`` distinct orderings.
    """
    problem = SearchProblem(layer, arch, spatial, AllocationMode(mode), metric)
    lpfs = problem.lpfs(lpf_limit)
    distinct = count_distinct_orderings(lpfs)
    if distinct > cap:
        raise SpaceTooLarge(f"Layer {layer.name}: {distinct} orderings exceed the exhaustive cap {cap}")

    start = time.perf_counter()
    if workers > 1 and distinct > 1:
        batch = math.ceil(distinct / (workers * BATCHES_PER_WORKER))
        tasks = [(problem, lpfs, low, min(low + batch, distinct)) for low in range(0, distinct, batch)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            partials = list(executor.map(_scan_range_task, tasks))
    else:
        partials = [_scan_range(problem, lpfs, 0, distinct)]

    best_rank, _ = min(partials, key=lambda partial: (partial[1], partial[0]))
    best = next(generate_orderings(lpfs, best_rank, best_rank + 1))
    mapping, breakdown, value = problem.cost(best)
    wall_time = time.perf_counter() - start
    logger.info(f"Exhaustive on {layer.name}: {distinct} orderings, best {value:.6g} in {wall_time:.3f}s")
    return SearchResult(
        best_mapping=mapping, best_cost=breakdown, best_objective=value,
        engine_used=EngineKind.EXHAUSTIVE, evaluations=distinct, wall_time=wall_time,
        distinct_orderings=distinct,
    )


# Random sampling baseline

def random_search(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling, mode: AllocationMode,
                  samples: int, seed: int, lpf_limit: Optional[int] = None,
                  metric: Metric = Metric.ENERGY) -> SearchResult:
    """Evaluate ``samples`` uniformly random orderings; every sample is recorded in the trace."""
    problem = SearchProblem(layer, arch, spatial, AllocationMode(mode), metric)
    lpfs = problem.lpfs(lpf_limit)
    rng = SeededRNG(seed).fork("random-baseline")
    start = time.perf_counter()

    best, best_value = None, math.inf
    trace: List[TraceEntry] = []
    for iteration in range(samples):
        ordering = random_ordering(lpfs, rng)
        _, _, value = problem.cost(ordering)
        if value < best_value:
            best, best_value = ordering, value
        trace.append(TraceEntry(0, iteration, value, False, 0.0))

    if best is None:
        best = canonical_ordering(lpfs)
    mapping, breakdown, value = problem.cost(best)
    return SearchResult(
        best_mapping=mapping, best_cost=breakdown, best_objective=value,
        engine_used=EngineKind.RANDOM, evaluations=samples, wall_time=time.perf_counter() - start,
        distinct_orderings=count_distinct_orderings(lpfs), trace=trace,
    )


# Engine selection

def estimate_exhaustive_time(lpfs: Sequence[Loop], tau: float) -> float:
    """Seconds to evaluate every distinct ordering at ``tau`` seconds each."""
    return tau * count_distinct_orderings(lpfs)


def calibrate_tau(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling, samples: int = 50,
                  mode: AllocationMode = AllocationMode.UNEVEN, seed: int = 0) -> float:
    """Median wall time of one allocate+evaluate on random orderings."""
    problem = SearchProblem(layer, arch, spatial, AllocationMode(mode))
    lpfs = problem.lpfs()
    rng = SeededRNG(seed).fork("calibration")
    timings = []
    for _ in range(max(1, samples)):
        ordering = random_ordering(lpfs, rng)
        start = time.perf_counter()
        problem.cost(ordering)
        timings.append(time.perf_counter() - start)
    return float(np.median(timings))


def select_engine(lpfs: Sequence[Loop], params: SaParams, tau: float, kappa: float = 1.0) -> EngineKind:
    """
    Exhaustive when its estimated time is within ``kappa`` times the annealing budget.

    Both estimates scale with ``tau``, so the decision is D <= kappa * I * restarts.
    """
    distinct = count_distinct_orderings(lpfs)
    budget = params.iterations * params.restarts
    choice = EngineKind.EXHAUSTIVE if distinct <= kappa * budget else EngineKind.SA
    logger.info(
        f"Engine selection: D={distinct}, exhaustive~{estimate_exhaustive_time(lpfs, tau):.3g}s, "
        f"SA~{tau * budget:.3g}s -> {choice.value}"
    )
    return choice


def schedule(layer: LayerSpec, arch: ArchSpec, spatial: SpatialUnrolling, mode: AllocationMode,
             params: SaParams, engine: str = "auto", lpf_limit: Optional[int] = None,
             kappa: float = 1.0, cap: int = DEFAULT_EXHAUSTIVE_CAP, tau_samples: int = 50,
             workers: int = 1) -> SearchResult:
    """Pick an engine (unless forced) and run it."""
    if engine == "auto":
        lpfs = lpf_decompose(layer, spatial)
        if lpf_limit is not None:
            lpfs = limit_lpfs(lpfs, lpf_limit)
        tau = calibrate_tau(layer, arch, spatial, tau_samples, mode, params.seed)
        choice = select_engine(lpfs, params, tau, kappa)
    else:
        choice = EngineKind(engine)

    if choice == EngineKind.EXHAUSTIVE:
        return exhaustive_search(layer, arch, spatial, mode, lpf_limit, cap, workers)
    if choice == EngineKind.SA:
        return sa_search(layer, arch, spatial, mode, params, lpf_limit, workers)
    raise ValueError(f"Unknown engine: {engine}")
