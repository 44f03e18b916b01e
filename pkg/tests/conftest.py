import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from covrep.model import make_rep
from covrep.shifts import WeightedShiftSpec, build_shift

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def nilpotent_shift(h=4):
    """e_m -> e_{m+1}, e_{h-1} -> 0."""
    s = np.zeros((h, h))
    for m in range(h - 1):
        s[m + 1, m] = 1.0
    return s


@pytest.fixture
def ex_a():
    # coisometry [I2, 0]
    return make_rep(2, 2, np.hstack([np.eye(2), np.zeros((2, 2))]))


@pytest.fixture
def ex_b():
    return make_rep(2, 2, np.hstack([np.diag([2.0, 1.0]), np.zeros((2, 2))]))


@pytest.fixture
def ex_c():
    return make_rep(4, 1, nilpotent_shift(4))


@pytest.fixture
def ex_d_spec():
    # bilateral, window -2..2, weights 1, 2, 0, 3, 1
    return WeightedShiftSpec("bilateral", 1, (-2, 2), np.array([[1.0, 2.0, 0.0, 3.0, 1.0]]))


@pytest.fixture
def ex_d(ex_d_spec):
    return build_shift(ex_d_spec).rep


@pytest.fixture
def ex_c2():
    # EX-C with a second, zero generator so that it can be summed with EX-A
    return make_rep(4, 2, np.hstack([nilpotent_shift(4), np.zeros((4, 4))]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, detail = RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
