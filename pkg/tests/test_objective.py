import math

import numpy as np
import pytest

from conftest import disk_points, separated_points
from sendovlab.cpoly import ZeroConfig, critical_points, roots_of_unity, transform
from sendovlab.errors import ContractError
from sendovlab.extremal import centroid_weights, centroid_xi, sendov_S, sendov_S_ell
from sendovlab.sampler import sample_stratum
from sendovlab.strata import parse_stratum


def test_S_of_seventh_roots():
    v = sendov_S(roots_of_unity(7))
    assert abs(v.value - 1) <= 1e-12


def test_S_of_double_zero():
    assert sendov_S(ZeroConfig((0.3,), (2,))).value == 0.0


def test_S_brute_force(rng):
    for _ in range(100):
        z = separated_points(rng, 4, 1e-3)
        c = ZeroConfig.simple(z)
        zeta = np.roots(np.polyder(np.poly(z)))
        brute = max(min(abs(a - b) for b in zeta) for a in z)
        v = sendov_S(c)
        assert abs(v.value - brute) <= 1e-10
        crit = critical_points(c).all_locations
        idx = v.attaining_crit_index
        assert abs(abs(z[v.attaining_zero_index] - crit[idx]) - v.value) <= 1e-12


def test_S_with_multiple_zero_is_zero_there():
    c = ZeroConfig((0, 1), (2, 1))
    v = sendov_S(c)
    # the simple zero 1 sees critical points 0 and 2/3
    assert v.value == pytest.approx(1 / 3, abs=1e-15) and v.attaining_zero_index == 1


def test_S_ell_examples():
    assert sendov_S_ell(ZeroConfig.simple([1, -1]), 0).value == pytest.approx(1, abs=1e-15)
    for n in (3, 6, 9):
        for ell in range(n):
            assert abs(sendov_S_ell(roots_of_unity(n), ell).value - 1) <= 1e-10
    assert sendov_S_ell(ZeroConfig((0, 1), (2, 1)), 1).value == pytest.approx(1 / 3, abs=1e-15)


def test_S_ell_contracts():
    with pytest.raises(ContractError):
        sendov_S_ell(ZeroConfig((0, 1), (2, 1)), 0)
    with pytest.raises(ContractError):
        sendov_S_ell(ZeroConfig.simple([1, -1]), 2)
    with pytest.raises(ContractError):
        sendov_S(ZeroConfig((0.5,), (1,)))


def test_S_rotation_invariance_and_scaling(rng):
    for _ in range(100):
        c = ZeroConfig.simple(separated_points(rng, int(rng.integers(2, 9)), 1e-2))
        s = sendov_S(c).value
        phi = float(rng.uniform(0, 2 * math.pi))
        assert abs(sendov_S(transform(c, phi)).value - s) <= 1e-12
        lam = float(rng.uniform(0.1, 5))
        assert abs(sendov_S(transform(c, 0, lam)).value - lam * s) <= 1e-12 * lam * max(s, 1)
        ell = int(rng.integers(0, c.m))
        s_ell = sendov_S_ell(c, ell).value
        assert abs(sendov_S_ell(transform(c, phi), ell).value - s_ell) <= 1e-12


def test_centroid_examples():
    assert abs(centroid_xi(roots_of_unity(6))) <= 1e-15
    a, b = 0.3 + 0.2j, -0.7 + 0.1j
    assert centroid_xi(ZeroConfig.simple([a, b])) == pytest.approx((a + b) / 2, abs=1e-16)
    assert centroid_xi(ZeroConfig((0, 1), (2, 1))) == pytest.approx(2 / 3, abs=1e-16)


def test_centroid_weights_sum_to_n():
    c = ZeroConfig((0, 1, 0.5j, -0.5), (2, 1, 3, 1))
    assert centroid_weights(c).sum() == pytest.approx(c.n)


def test_centroid_matches_roots_on_sampled_strata(rng):
    for text in ["4:1,1,1,1/3", "6:2,1,1,1,1/4", "5:1,2,2/2", "7:3,1,1,1,1/4"]:
        for _ in range(10):
            config, crit = sample_stratum(parse_stratum(text), rng)
            assert abs(centroid_xi(config) - crit.xi[0]) <= 1e-10


def test_centroid_rejects_k_not_one(rng):
    c = ZeroConfig.simple(disk_points(rng, 4))
    with pytest.raises(ContractError):
        centroid_xi(c)
    # without the check the weighted average is returned regardless
    assert isinstance(centroid_xi(c, check=False), complex)
