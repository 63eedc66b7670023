import numpy as np
import pytest

from conftest import disk_points
from sendovlab.cpoly import ZeroConfig, critical_points, roots_of_unity
from sendovlab.errors import ContractError
from sendovlab.extremal import local_search, monte_carlo, screen_S, sendov_S
from sendovlab.extremal.search import BOUND_SLACK


def test_roots_of_unity_admit_no_improving_move():
    result = local_search(roots_of_unity(5), 0, 10_000, seed=3)
    assert result.accepted == 0
    assert result.trace[0] == pytest.approx(1, abs=1e-10)
    assert result.best_value == result.trace[0]
    assert result.findings == []
    assert result.kkt is not None and result.kkt.state.i0 == 0


def test_random_start_stays_below_one(rng):
    for seed in range(3):
        start = ZeroConfig.simple(disk_points(rng, 5))
        result = local_search(start, 0, 300, seed=seed)
        assert result.best_value <= 1 + BOUND_SLACK
        assert result.max_S <= 1 + BOUND_SLACK
        # accepted moves never decrease the objective
        assert np.all(np.diff(result.trace) >= 0)
        assert np.abs(result.best.array).max() <= 1 + 1e-12
        # Kuhn–Tucker diagnostics exist only when the end point has a single second-kind point
        k = critical_points(result.best).k
        assert (result.kkt is not None) == (k == 1)


def test_local_search_deterministic(rng):
    start = ZeroConfig.simple(disk_points(rng, 4))
    a = local_search(start, 1, 100, seed=9)
    b = local_search(start, 1, 100, seed=9)
    assert a.trace == b.trace and a.best == b.best


def test_local_search_contracts():
    with pytest.raises(ContractError):
        local_search(ZeroConfig((0.2,), (3,)), 0, 10, seed=0)
    with pytest.raises(ContractError):
        local_search(ZeroConfig.simple([2, 0]), 0, 10, seed=0)
    with pytest.raises(ContractError):
        local_search(ZeroConfig((0, 0.5), (2, 1)), 0, 10, seed=0)


def test_screen_matches_exact(rng):
    z = np.sqrt(rng.random((50, 6))) * np.exp(2j * np.pi * rng.random((50, 6)))
    approx = screen_S(z)
    exact = [sendov_S(ZeroConfig.simple(row)).value for row in z]
    assert np.allclose(approx, exact, atol=1e-8)


def test_two_zeros_is_half_distance(rng):
    z = np.sqrt(rng.random((20, 2))) * np.exp(2j * np.pi * rng.random((20, 2)))
    assert np.allclose(screen_S(z), np.abs(z[:, 0] - z[:, 1]) / 2, atol=1e-14)


def test_monte_carlo_two_zeros():
    result = monte_carlo(2, 100_000, seed=2)
    assert result.max_S <= 1 + BOUND_SLACK
    assert result.findings == []
    assert result.max_S == pytest.approx(sendov_S(result.argmax).value, abs=1e-15)


def test_monte_carlo_deterministic_and_thread_independent(monkeypatch):
    monkeypatch.setenv("SENDOVLAB_THREADS", "3")
    a = monte_carlo(6, 10_000, seed=11, threads=1)
    b = monte_carlo(6, 10_000, seed=11, threads=3)
    assert a.max_S == b.max_S and a.argmax == b.argmax


def test_monte_carlo_findings_threshold():
    result = monte_carlo(3, 5_000, seed=1, eps_report=0.5)
    assert result.findings
    assert all(f.value > 0.5 and not f.violation for f in result.findings)


def test_monte_carlo_contracts():
    with pytest.raises(ContractError):
        monte_carlo(1, 10, seed=0)
    with pytest.raises(ContractError):
        monte_carlo(3, 0, seed=0)
