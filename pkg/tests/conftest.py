import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE[number] = ("PASS" if passed else "FAIL", title, detail)
        print(f"criterion {number} [{ACCEPTANCE[number][0]}] {title}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{n}. {status}  {title}  ({detail})")
