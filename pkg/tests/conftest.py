import numpy as np
import pytest

from tropbe.poly import Polynomial

# coefficients c_0..c_7 of 1/2 x^7 + 3 x^6 + 1/2 x^5 + 5 x^4 + 5/2 x^3 + 3 x^2 + 6 x + 5/2
FIG2 = [2.5, 6.0, 3.0, 2.5, 5.0, 0.5, 3.0, 0.5]


@pytest.fixture
def fig2():
    return Polynomial(FIG2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
