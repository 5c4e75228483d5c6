import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lorentzw import catalog

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ex1():
    return catalog.example_5_1()


@pytest.fixture(scope="session")
def ex2():
    return catalog.example_5_2()


@pytest.fixture(scope="session")
def plane():
    return catalog.degenerate_plane()


@pytest.fixture(scope="session")
def one_dim():
    return catalog.degenerate_one_dim_normal()


def admissible_points(entry, n, box, seed=0):
    """n random (u, v) inside ``box`` = (lo, hi) avoiding the entry's excluded set."""
    rng = np.random.default_rng(seed)
    us, vs = [], []
    while len(us) < n:
        u, v = rng.uniform(*box, 2)
        if entry.excluded is None or not entry.excluded(u, v):
            us.append(u)
            vs.append(v)
    return np.array(us), np.array(vs)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
