#!/usr/bin/env python3
"""
Script to survey the loop-ordering search space of every unique layer in a network.
Shows LPF count, distinct orderings, estimated exhaustive and annealing time
and the engine the scheduler would pick.
"""

import sys
from pathlib import Path

# Add the repository root to the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.settings import get_settings
from src.models.arch import SpatialUnrolling
from src.models.mapping import SaParams
from src.services.allocator import unique_layers
from src.services.config_loader import load_arch, load_network, load_spatial
from src.services.engines import calibrate_tau, estimate_exhaustive_time, select_engine
from src.services.ordering import count_distinct_orderings
from src.services.workload import lpf_decompose
from src.utils.logger import setup_logger, get_logger

# Setup logging
setup_logger()
logger = get_logger(__name__)


def _seconds(value: float) -> str:
    if value < 1e5:
        return f"{value:.3g}s"
    return f"{value / 3.154e7:.3g}y"


def survey(network_path: str, arch_path: str, spatial_path: str = None):
    """Print one line per unique layer."""
    settings = get_settings()
    network = load_network(network_path)
    arch = load_arch(arch_path)
    spatial = load_spatial(spatial_path) if spatial_path else SpatialUnrolling()
    params = SaParams(iterations=settings.sa_iterations, restarts=settings.sa_restarts)

    groups = unique_layers(network)
    print(f"📊 Search space of {network_path} on {arch.name}")
    print(f"Layers: {len(network)} total, {len(groups)} unique")
    print("=" * 78)
    print(f"{'layer':<20}{'x':>3}{'LPFs':>6}{'orderings':>14}{'exhaustive':>12}{'SA':>10}{'engine':>12}")
    print("-" * 78)
    for layer, multiplicity in groups:
        lpfs = lpf_decompose(layer, spatial)
        tau = calibrate_tau(layer, arch, spatial, settings.tau_samples)
        distinct = count_distinct_orderings(lpfs)
        engine = select_engine(lpfs, params, tau, settings.selection_kappa)
        sa_time = tau * params.iterations * params.restarts
        print(
            f"{layer.name:<20}{multiplicity:>3}{len(lpfs):>6}{distinct:>14.3g}"
            f"{_seconds(estimate_exhaustive_time(lpfs, tau)):>12}{_seconds(sa_time):>10}{engine.value:>12}"
        )
    print()


def main():
    """Main function."""
    if len(sys.argv) < 3:
        print("Usage: search_space_report.py <network.yaml> <arch.yaml> [spatial.yaml]")
        return 1
    survey(sys.argv[1], sys.argv[2], sys.argv[3] if len(sys.argv) > 3 else None)
    return 0


if __name__ == "__main__":
    try:
        exit_code = main()
        sys.exit(exit_code)
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.")
        sys.exit(1)
    except Exception as e:
        print(f"\n❌ Error: {e}")
        sys.exit(1)
