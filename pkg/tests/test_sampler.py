import numpy as np
import pytest

from sendovlab.cpoly import critical_points
from sendovlab.errors import ContractError
from sendovlab.jacobian import system_residual
from sendovlab.sampler import enumerate_strata, sample_state, sample_stratum
from sendovlab.strata import Structure, parse_stratum


@pytest.mark.parametrize("text", ["2:1,1/1", "4:1,1,1,1/3", "5:1,1,1,1,1/2,2", "6:1,1,1,1,1,1/3,1,1",
                                  "5:2,1,1,1/3", "6:1,1,1,3/2,1", "8:2,2,2,2/3"])
def test_sample_lands_on_stratum(text, rng):
    stratum = parse_stratum(text)
    for _ in range(5):
        config, crit = sample_stratum(stratum, rng)
        assert config.multiplicities == stratum.mu
        assert crit.nu == stratum.nu
        fresh = critical_points(config)
        assert sorted(fresh.nu) == sorted(stratum.nu)
        assert np.abs(config.array).max() == pytest.approx(1, abs=1e-12)
        res = system_residual(config, crit.xi, crit.nu)
        assert np.abs(res).max() <= 1e-10


def test_sample_state_matches():
    st = sample_state(Structure((1,) * 5, (2, 2)), np.random.default_rng(0))
    assert st.stratum.nu == (2, 2) and len(st.xi) == 2


def test_sampler_is_seeded():
    a, _ = sample_stratum(Structure((1,) * 5, (4,)), np.random.default_rng(5))
    b, _ = sample_stratum(Structure((1,) * 5, (4,)), np.random.default_rng(5))
    assert a == b


def test_enumerate_strata():
    ones = enumerate_strata(6, mu_patterns=("ones",))
    # one stratum per partition of m - 1 for m = 2..6
    assert len(ones) == 1 + 2 + 3 + 5 + 7
    assert all(s.mu == (1,) * s.m for s in ones)
    both = enumerate_strata(3)
    assert Structure((2, 1, 1), (1, 1)) in both
    with pytest.raises(ContractError):
        enumerate_strata(3, mu_patterns=("bogus",))
