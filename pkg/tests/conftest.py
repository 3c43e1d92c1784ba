import numpy as np
import pytest

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20041)


@pytest.fixture
def record():
    """Log one acceptance line; printed in the terminal summary."""
    def _record(criterion: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE_RESULTS.append((criterion, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE_RESULTS:
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {criterion}" + (f"  ({detail})" if detail else ""))


def random_unit_pair(rng) -> tuple[complex, complex]:
    """(a, b) uniform on the unit sphere of C^2."""
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])
