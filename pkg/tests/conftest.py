import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "wrtlab", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("wrtlab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: dict = {}


@pytest.fixture(scope="session")
def criterion_log():
    """Record one pass/fail line per acceptance criterion."""

    def log(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
