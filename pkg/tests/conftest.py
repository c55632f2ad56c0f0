import pytest

from hybrid_actuator import ActuatorGeometry, HyperelasticMaterial, inflate


@pytest.fixture
def geom():
    # (a, b, t, l, R) = (0.5, 10, 1.5, 8, 8) mm with the documented d = 1 mm
    return ActuatorGeometry()


@pytest.fixture
def inflated(geom):
    return inflate(geom)


@pytest.fixture
def mat():
    return HyperelasticMaterial(0.07)


_ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one acceptance line; shown in the terminal summary."""

    def _record(criterion: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
