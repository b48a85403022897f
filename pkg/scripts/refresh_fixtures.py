#!/usr/bin/env python3
"""
Script to write validation fixtures with oracle-produced expectations.
Expected values (distinct orderings, brute-force optimum, canonical-ordering
access counts) always come from the oracle, never from hand edits.
"""

import re
import sys
from pathlib import Path

# Add the repository root to the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.services.config_loader import dump_yaml, fixture_files, read_yaml
from src.services.fixtures import Fixture, builtin_fixtures, expectation_for
from src.services.reporting import write_text_atomic
from src.utils.logger import setup_logger, get_logger

# Setup logging
setup_logger()
logger = get_logger(__name__)

DEFAULT_DIR = Path(__file__).parent.parent / "configs" / "fixtures"
HEADER = "# Expected values are written by scripts/refresh_fixtures.py from the oracle.\n"


def _file_name(fixture: Fixture) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", fixture.name).strip("_") + ".yaml"


def _write(fixture: Fixture, path: Path) -> None:
    expected = expectation_for(fixture)
    refreshed = fixture.model_copy(update={"expected": expected})
    write_text_atomic(str(path), HEADER + dump_yaml(refreshed.to_config()))
    print(f"  {fixture.name}: D={expected.distinct_orderings}, optimum={expected.optimal_objective!r}")


def write_builtin(directory: Path):
    """Write every built-in fixture into ``directory``."""
    fixtures = builtin_fixtures()
    print(f"📝 Writing {len(fixtures)} built-in fixtures to {directory}")
    print("=" * 50)
    for fixture in fixtures:
        _write(fixture, directory / _file_name(fixture))
    print(f"✅ Wrote {len(fixtures)} fixtures")


def refresh_existing(directory: Path):
    """Recompute the expectations of the fixture files already in ``directory``."""
    paths = fixture_files(str(directory))
    print(f"🔄 Refreshing {len(paths)} fixtures in {directory}")
    print("=" * 50)
    for path in paths:
        fixture = Fixture.model_validate(read_yaml(str(path)))
        _write(fixture, path)
    print(f"✅ Refreshed {len(paths)} fixtures")


def main():
    """Main function."""
    command = sys.argv[1].lower() if len(sys.argv) > 1 else "refresh"
    directory = Path(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_DIR

    if command == "refresh":
        refresh_existing(directory)
    elif command == "builtin":
        write_builtin(directory)
    else:
        print(f"❌ Unknown command: {command}")
        print("Available commands:")
        print("  refresh [dir]  - Recompute expectations of existing fixture files")
        print("  builtin [dir]  - Write the built-in fixture set with expectations")
        return 1
    return 0


if __name__ == "__main__":
    try:
        exit_code = main()
        sys.exit(exit_code)
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.")
        sys.exit(1)
    except Exception as e:
        logger.error(f"Fixture refresh failed: {e}")
        print(f"\n❌ Error: {e}")
        sys.exit(1)
