import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def t_state():
    """The one-qubit magic state with Bloch vector (1, 1, 1) / sqrt(3)."""
    th = np.arccos(1 / np.sqrt(3))
    return np.array([np.cos(th / 2), np.exp(1j * np.pi / 4) * np.sin(th / 2)])


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """``report(criterion, ok, detail)`` records a PASS/FAIL line, printed at the end of the run."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def report(criterion: int, ok: bool, detail: str) -> bool:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
