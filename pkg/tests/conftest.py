import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "drwave", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("drwave")

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    """Remember one acceptance verdict for the end-of-run summary."""
    ACCEPTANCE_LINES.append(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {title} ({detail})")


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def space21():
    from drwave.space import new_space

    return new_space(2, 1)


@pytest.fixture(scope="session")
def space22():
    from drwave.space import new_space

    return new_space(2, 2)
