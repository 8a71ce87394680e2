import numpy as np
import pytest

from semilab import _kernels
from semilab._kernels import _reference


@pytest.fixture(params=["cython", "python"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    if request.param == "cython":
        if _kernels.BACKEND != "cython":
            pytest.skip("compiled kernels not built")
    else:
        for name in ("phase_rotate", "weighted_mass", "wigner_correlation"):
            monkeypatch.setattr(_kernels, name, getattr(_reference, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def report():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def _report(n, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {text}"
        _ACCEPTANCE[n] = line
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
