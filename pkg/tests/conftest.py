import numpy as np
import pytest

import divcert as dc
from helpers import ACCEPTANCE_LINES, draw_oracle_configs, make_single_annulus


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_schedule():
    """The reference configuration used across the certificate tests:
    quadratic symbol, identity approach profile, n=1, K=6, N=81."""
    sym = dc.homogeneous(2.0, n=1, validity_radius=0.0)
    partial = dc.build_spatial_schedule(dc.identity_profile(), 1, 6)
    sched = dc.build_annulus_schedule(sym, partial, N=81)
    dc.validate_schedule(sched)
    return sched


@pytest.fixture(scope="session")
def theorem2_strong_schedule():
    sym = dc.homogeneous(1.0, n=1, validity_radius=0.0)
    sched = dc.build_theorem2_schedule(
        sym, [0.0], dc.identity_profile(), 1, 45, N=81,
        variant="theorem2-strong")
    dc.validate_schedule(sched)
    return sched


@pytest.fixture(scope="session")
def theorem2_weak_schedule():
    sym = dc.homogeneous(1.0, n=1, validity_radius=0.0)
    sched = dc.build_theorem2_schedule(
        sym, [0.0], dc.identity_profile(), 1, 45, N=81,
        variant="theorem2-weak", beta=1.0)
    dc.validate_schedule(sched)
    return sched


@pytest.fixture(scope="session")
def single_annulus():
    return make_single_annulus


@pytest.fixture(scope="session")
def oracle_configs():
    configs = draw_oracle_configs()
    assert len(configs) == 50
    return configs


@pytest.fixture(scope="session")
def acceptance_certificates(acceptance_schedule):
    rows, certs = dc.blowup_table(acceptance_schedule)
    return rows, certs


@pytest.fixture(autouse=True)
def _no_numpy_warnings():
    # overflow in the schedule recursion must saturate through plain
    # Python floats, never hit numpy warning machinery
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        yield
