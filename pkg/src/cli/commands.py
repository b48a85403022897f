"""
Command implementations for the scheduler CLI.
Each command returns a process exit code.
"""

import sys
from argparse import Namespace
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.config.settings import Settings, get_settings
from src.models.arch import ArchSpec, SpatialUnrolling
from src.models.mapping import AllocationMode, SaParams
from src.models.report import SweepEntry, SweepReport, ValidationReport
from src.services.allocator import unique_layers
from src.services.archspec import validate_arch, validate_spatial
from src.services.config_loader import (
    fixture_files,
    load_arch,
    load_layer,
    load_network,
    load_spatial,
    read_yaml,
)
from src.services.engines import random_search, sa_search, schedule
from src.services.fixtures import (
    Fixture,
    builtin_fixtures,
    check_ordering,
    optimality_study,
    random_fixtures,
    study_fixtures,
    validate_fixture,
)
from src.services.reporting import (
    DISTRIBUTION_HEADER,
    build_run_report,
    csv_text,
    distribution_rows,
    serialize_report,
    write_text_atomic,
)
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_SPACE = 3

STUDY_HEADER = ("fixture", "distinct_orderings", "optimum", "runs", "hit_rate", "mean_excess")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text_atomic(out, text)
        logger.info(f"Results written to {out}")
    else:
        sys.stdout.write(text)


def sa_params_from(args: Namespace, settings: Settings) -> SaParams:
    """Flags override settings, settings override model defaults."""

    def pick(flag: str, default):
        value = getattr(args, flag, None)
        return default if value is None else value

    return SaParams(
        iterations=pick("iterations", settings.sa_iterations),
        rho=pick("rho", settings.sa_rho),
        t0=pick("t0", settings.sa_t0),
        seed=pick("seed", settings.seed),
        restarts=pick("restarts", settings.sa_restarts),
        initial=pick("initial", "random"),
    )


def _load_hardware(args: Namespace):
    arch = load_arch(args.arch)
    spatial = load_spatial(args.spatial) if getattr(args, "spatial", None) else SpatialUnrolling()
    for path, violations in ((args.arch, validate_arch(arch)),
                             (args.spatial, validate_spatial(arch, spatial))):
        if violations:
            first = violations[0]
            raise ConfigError(path, first.code, first.message)
    return arch, spatial


def _schedule_layer(layer, arch: ArchSpec, spatial: SpatialUnrolling, args: Namespace,
                    settings: Settings, params: SaParams):
    result = schedule(
        layer, arch, spatial, AllocationMode(args.mode), params,
        engine=args.engine,
        lpf_limit=args.lpf_limit,
        kappa=settings.selection_kappa,
        cap=settings.exhaustive_cap,
        tau_samples=settings.tau_samples,
        workers=args.workers or settings.workers,
    )
    return build_run_report(layer, arch, result, params, args.lpf_limit)


def cmd_schedule(args: Namespace) -> int:
    """Schedule one layer and write its run report."""
    settings = get_settings()
    layer = load_layer(args.layer)
    arch, spatial = _load_hardware(args)
    params = sa_params_from(args, settings)

    logger.info(f"Scheduling {layer.name} on {arch.name} ({args.mode} mapping, engine {args.engine})")
    report = _schedule_layer(layer, arch, spatial, args, settings, params)
    _emit(serialize_report(report), args.out)
    return EXIT_OK


def cmd_sweep(args: Namespace) -> int:
    """Schedule every unique layer of a network once."""
    settings = get_settings()
    network = load_network(args.network)
    arch, spatial = _load_hardware(args)
    params = sa_params_from(args, settings)

    groups = unique_layers(network)
    logger.info(f"Network {args.network}: {len(network)} layers, {len(groups)} unique")

    entries: List[SweepEntry] = []
    total = 0.0
    for position, (layer, multiplicity) in enumerate(groups, 1):
        logger.info(f"[{position}/{len(groups)}] {layer.name} (x{multiplicity})")
        report = _schedule_layer(layer, arch, spatial, args, settings, params)
        entries.append(SweepEntry(multiplicity=multiplicity, report=report))
        total += report.objective * multiplicity

    sweep = SweepReport(
        network=Path(args.network).stem,
        total_layers=len(network),
        unique_layers=len(groups),
        total_energy=total,
        entries=entries,
    )
    _emit(serialize_report(sweep), args.out)
    return EXIT_OK


def cmd_distribution(args: Namespace) -> int:
    """Objective values visited by one annealing run and by as many random samples."""
    settings = get_settings()
    layer = load_layer(args.layer)
    arch, spatial = _load_hardware(args)
    params = sa_params_from(args, settings).model_copy(update={"iterations": args.samples, "restarts": 1})
    mode = AllocationMode(args.mode)

    sa_result = sa_search(layer, arch, spatial, mode, params, args.lpf_limit)
    random_result = random_search(layer, arch, spatial, mode, args.samples, params.seed, args.lpf_limit)
    logger.info(
        f"Distribution on {layer.name}: SA best {sa_result.best_objective:.6g}, "
        f"random best {random_result.best_objective:.6g}"
    )
    _emit(csv_text(DISTRIBUTION_HEADER, distribution_rows(sa_result, random_result, args.samples)), args.out)
    return EXIT_OK


def _load_fixtures(directory: str) -> List[Fixture]:
    fixtures = []
    for path in fixture_files(directory):
        data = read_yaml(str(path))
        try:
            fixtures.append(Fixture.model_validate(data))
        except ValidationError as e:
            first = e.errors()[0]
            key = ".".join(str(part) for part in first["loc"]) or None
            raise ConfigError(str(path), key, first["msg"]) from e
    return fixtures


def cmd_validate(args: Namespace) -> int:
    """Check the analytical cost model against the loop-nest simulation."""
    settings = get_settings()
    seed = settings.seed if args.seed is None else args.seed
    cases = []
    if args.random:
        for fixture, ordering in random_fixtures(args.random, seed):
            cases.append(check_ordering(fixture, ordering, fixture.name, settings.oracle_budget))
    else:
        fixtures = _load_fixtures(args.fixtures) if args.fixtures else builtin_fixtures()
        for fixture in fixtures:
            cases.extend(validate_fixture(fixture, seed=seed, budget=settings.oracle_budget))

    failures = [case for case in cases if not case.passed]
    report = ValidationReport(passed=not failures, checks=len(cases), failures=len(failures), cases=failures[:1])
    if failures:
        logger.error(f"Validation failed: {len(failures)}/{len(cases)} checks mismatched, first {failures[0].name}")
    else:
        logger.info(f"Validation passed: {len(cases)} checks")
    _emit(serialize_report(report), args.out)
    return EXIT_OK if not failures else EXIT_MISMATCH


def cmd_study(args: Namespace) -> int:
    """Annealing hit rate and mean excess against brute-force optima."""
    settings = get_settings()
    params = sa_params_from(args, settings)
    fixtures = _load_fixtures(args.fixtures) if args.fixtures else study_fixtures()
    result = optimality_study(fixtures, args.runs, params.seed, params)

    rows = [
        (row.fixture, row.distinct_orderings, repr(row.optimum), row.runs, repr(row.hit_rate), repr(row.mean_excess))
        for row in result.rows
    ]
    rows.append(("ALL", "", "", sum(row.runs for row in result.rows), repr(result.hit_rate), repr(result.mean_excess)))
    _emit(csv_text(STUDY_HEADER, rows), args.out)
    return EXIT_OK
