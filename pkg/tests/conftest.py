import pytest

from hybridgrid.load import DEFAULT_APPLIANCES, synthesize_load
from hybridgrid.resource import PENANG_DAILY_GHI, PENANG_MONTHLY_WIND, synthesize_resource_year


@pytest.fixture(scope="session")
def penang_year():
    return synthesize_resource_year([PENANG_DAILY_GHI] * 12, PENANG_MONTHLY_WIND, seed=1)


@pytest.fixture(scope="session")
def resort_load():
    return synthesize_load(DEFAULT_APPLIANCES, seed=1, calibrate_to_targets=True)


ACCEPTANCE_LINES = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, checks: dict):
        failed = [name for name, ok in checks.items() if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f" (failed: {', '.join(failed)})" if failed else ""
        ACCEPTANCE_LINES[number] = f"criterion {number} {status}: {title}{detail}"
        assert not failed, ACCEPTANCE_LINES[number]

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
