import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ballistic_bell.bell import violation_interval  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"
SHIPPED_CONFIG = Path(__file__).parents[1] / "src" / "ballistic_bell" / "data" / "gaas_bell.cfg"


@functools.lru_cache(maxsize=None)
def cached_violation_interval(step: float = 0.01):
    return violation_interval(step)


@pytest.fixture(scope="session")
def violation():
    return cached_violation_interval()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, title, detail = RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
