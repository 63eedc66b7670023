import cmath
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def disk_points(rng, size, radius=1.0):
    """Area-uniform points in the disk of the given radius."""
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(2j * math.pi * rng.random(size))


def separated_points(rng, size, min_sep, radius=1.0):
    pts = []
    while len(pts) < size:
        z = complex(disk_points(rng, 1, radius)[0])
        if all(abs(z - w) >= min_sep for w in pts):
            pts.append(z)
    return np.array(pts)


def unity(n):
    return np.array([cmath.exp(2j * math.pi * k / n) for k in range(n)])


def match_sets(a, b):
    """Largest distance after greedily pairing two equal-size point sets."""
    a, b = list(np.asarray(a, dtype=complex)), list(np.asarray(b, dtype=complex))
    assert len(a) == len(b)
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b[j]))
        b.pop(j)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
