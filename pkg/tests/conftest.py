import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lamhyp import lambdaode  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def closed_curve(lam, p, q, vertex_count):
    """Closed lambda-curve search with the non-monotone warning silenced."""
    return _closed_curve(float(lam), int(p), int(q), int(vertex_count))


_CACHE: dict = {}


def _closed_curve(lam, p, q, vertex_count):
    key = (lam, p, q, vertex_count)
    if key not in _CACHE:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", lambdaode.NonMonotonePeriodWarning)
            _CACHE[key] = lambdaode.find_closed_curve(lam, p, q, vertex_count=vertex_count)
    return _CACHE[key]


@pytest.fixture(scope="session")
def curve_neg1_37():
    """The lambda = -1 closed curve with turning number 3 (4096 vertices)."""
    return closed_curve(-1.0, 3, 7, 4096)


@pytest.fixture(scope="session")
def curve_neg_half_12():
    """The embedded lambda = -1/2 closed curve with turning number 1."""
    return closed_curve(-0.5, 1, 2, 2048)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
