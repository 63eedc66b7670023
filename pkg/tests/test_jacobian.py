import numpy as np
import pytest

from conftest import separated_points
from sendovlab.cpoly import CriticalSet, ZeroConfig, critical_points, eval_derivatives, roots_of_unity
from sendovlab.errors import ContractError
from sendovlab.jacobian import (
    assemble,
    fd_jacobian,
    fd_mismatch,
    rank_certificate,
    rank_sweep,
    residual_scale,
    sub_seed,
    system_residual,
)
from sendovlab.sampler import sample_stratum
from sendovlab.strata import Structure, parse_stratum


def test_two_zeros_is_p_second_derivative():
    c = ZeroConfig.simple([1, -1])
    jac = assemble(c, critical_points(c))
    assert jac.matrix.shape == (1, 1)
    assert jac.matrix[0, 0] == pytest.approx(2, abs=1e-14)
    cert = rank_certificate(jac)
    assert cert.rank == 1 and cert.sigma_min == pytest.approx(2)


def test_cube_roots_hand_values():
    # z^3 - 1, dependent zero z_1 = 1, Omega_1 = -(z^2 + z + 1): Omega_1'(0) = -1, Omega_1''(0) = -2,
    # and p'''(0) = 6 couples xi in the second row
    c = roots_of_unity(3)
    crit = critical_points(c)
    jac = assemble(c, crit)
    assert (jac.s, jac.k, jac.nu) == (1, 1, (2,))
    assert np.allclose(jac.matrix, [[-1, 0], [-2, 6]], atol=1e-12)
    assert rank_certificate(jac).rank == 2
    assert jac.row_labels == [(0, 1), (0, 2)]
    assert jac.column_labels == [("z", 0), ("xi", 0)]


def test_duplicated_column_is_rank_deficient():
    cert = rank_certificate(np.array([[1.0, 1.0], [2.0, 2.0]]))
    assert cert.rank == 1 and not cert.full


def test_empty_jacobian_certificate():
    cert = rank_certificate(np.zeros((0, 0)))
    assert cert.rank == 0 and cert.full


def test_s_zero_is_diagonal_of_second_derivatives(rng):
    stratum = Structure((1,) * 5, (1, 1, 1, 1))
    for _ in range(20):
        config, crit = sample_stratum(stratum, rng)
        jac = assemble(config, crit)
        diag = [eval_derivatives(config, x, 2)[2] for x in crit.xi]
        assert np.allclose(jac.matrix, np.diag(diag), rtol=0, atol=1e-12 * max(1, np.abs(diag).max()))


def test_block_sparsity_of_xi_columns(rng):
    for text in ["6:1,1,1,1,1,1/3,2", "7:1,1,1,1,1,1,1/2,2,2", "6:2,1,1,1,1/2,1,1"]:
        stratum = parse_stratum(text)
        config, crit = sample_stratum(stratum, rng)
        jac = assemble(config, crit, structural=False)
        rows = jac.row_labels
        for j in range(jac.k):
            col = jac.matrix[:, jac.s + j]
            for r, (jj, _) in enumerate(rows):
                if jj != j:
                    assert abs(col[r]) <= 1e-12


def test_full_form_vanishes_off_last_row_at_solution(rng):
    config, crit = sample_stratum(parse_stratum("6:1,1,1,1,1,1/3,2"), rng)
    full = assemble(config, crit, structural=False).matrix
    struct = assemble(config, crit).matrix
    scale = np.abs(full).max()
    assert np.abs(full - struct).max() <= 1e-9 * scale


def test_matches_finite_differences(rng):
    for text in ["5:1,1,1,1,1/4", "6:1,1,1,1,1,1/3,2", "5:2,1,1,1/3", "7:1,1,1,1,1,1,1/2,2,1,1"]:
        config, crit = sample_stratum(parse_stratum(text), rng)
        jac = assemble(config, crit, verify=True)
        assert fd_mismatch(jac, config, crit) <= 1e-5


def test_finite_difference_oracle_on_polynomial_map():
    # independent check of the map itself: p^(l)(xi) for p = z^3 - 1 is 3 xi^2, 6 xi
    c = roots_of_unity(3)
    r = system_residual(c, [0.1 + 0.2j], (2,))
    x = 0.1 + 0.2j
    assert np.allclose(r, [3 * x * x, 6 * x], atol=1e-14)
    fd = fd_jacobian(c, [(0j, 2)])
    assert np.allclose(fd, [[-1, 0], [-2, 6]], atol=1e-7)


def test_inconsistent_crit_is_rejected():
    c = roots_of_unity(4)
    with pytest.raises(ContractError):
        assemble(c, [(0j, 2)])


def test_residual_scale_at_least_one():
    c = roots_of_unity(5)
    assert residual_scale(c, [0j], (4,)) >= 1.0


def test_rank_sweep_simple_stratum():
    report = rank_sweep(Structure((1,) * 5, (1, 1, 1, 1)), 200, seed=1)
    assert report.deficient == [] and report.failures == []
    assert report.min_margin > 1e-8


def test_rank_sweep_cube_roots_type():
    report = rank_sweep(Structure((1, 1, 1), (2,)), 100, seed=2)
    assert report.deficient == [] and report.failures == []


def test_rank_sweep_empty():
    report = rank_sweep(Structure((1, 1, 1), (2,)), 0, seed=0)
    assert report.records == [] and np.isnan(report.min_margin)


def test_rank_sweep_thread_independent(monkeypatch):
    monkeypatch.setenv("SENDOVLAB_THREADS", "3")
    a = rank_sweep(Structure((1,) * 4, (2, 1)), 20, seed=5, threads=1)
    b = rank_sweep(Structure((1,) * 4, (2, 1)), 20, seed=5, threads=3)
    assert [r.margin for r in a.records] == [r.margin for r in b.records]


def test_sub_seed_deterministic():
    assert sub_seed(1, 2) == sub_seed(1, 2) != sub_seed(1, 3)


def test_hand_built_crit_set_accepted():
    c = ZeroConfig.simple([1, -1])
    jac = assemble(c, CriticalSet((), ((0j, 1),)))
    assert jac.matrix[0, 0] == pytest.approx(2)
