import pytest
from hypothesis import HealthCheck, settings

from lvalues import DrinfeldModule, field_make, ring_make

settings.register_profile(
    "lvalues", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lvalues")


@pytest.fixture(scope="session")
def f2():
    return field_make(2)


@pytest.fixture(scope="session")
def f3():
    return field_make(3)


@pytest.fixture(scope="session")
def r2(f2):
    return ring_make(f2, None)


@pytest.fixture(scope="session")
def r3(f3):
    return ring_make(f3, None)


@pytest.fixture(scope="session")
def quad(f2):
    return ring_make(f2, "y^2+y+t")


@pytest.fixture(scope="session")
def carlitz2(r2):
    return DrinfeldModule.carlitz(r2)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion and assert on it."""

    def record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line, flush=True)
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
