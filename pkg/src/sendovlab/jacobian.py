"""Jacobian of the critical-point system and its numerical rank.

For a configuration in the stratum ``(mu, nu)`` the second-kind critical
points satisfy

    p^(l)(xi_j) = 0,    j = 1..k,  l = 1..nu_j,

which is ``m - 1`` equations. The unknowns are the first ``s = m - 1 - k``
zeros (the *dependent* zeros) and the ``k`` critical points; the remaining
``k + 1`` zeros are free. Rows of the assembled matrix are the equations in
``(j, l)`` order, columns are ``z_1..z_s`` followed by ``xi_1..xi_k``. The
derivative of ``p`` with respect to a zero ``z_i`` is

    Omega_i(z) = -mu_i * p(z) / (z - z_i),

and with respect to ``xi_j`` it is ``p^(l+1)(xi_j)``, which at a solution
vanishes except in the last row of block ``j``. (This is the transpose of the
usual textbook display, where rows index the unknowns.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cpoly import DEFAULT_TOL, CriticalSet, Tolerances, ZeroConfig, taylor_coefficients
from .errors import ContractError, NumericError
from .strata import Structure

FD_STEP = 1e-6
FD_RTOL = 1e-5


def _second_kind(crit) -> tuple[np.ndarray, tuple]:
    if isinstance(crit, CriticalSet):
        pairs = crit.second_kind
    else:
        pairs = tuple(crit)
    xi = np.array([complex(x) for x, _ in pairs], dtype=complex)
    nu = tuple(int(v) for _, v in pairs)
    return xi, nu


def _check_shapes(config: ZeroConfig, nu) -> int:
    if sum(nu) != config.m - 1:
        raise ContractError(
            f"critical multiplicities sum to {sum(nu)}, expected m - 1 = {config.m - 1}"
        )
    return config.m - 1 - len(nu)


def _series_at(config: ZeroConfig, xi: complex, order: int):
    """Taylor data at ``xi``: derivatives of ``p`` and of every ``Omega_i``, up to ``order``."""
    series = taylor_coefficients(config, xi, order)
    fact = np.array([math.factorial(r) for r in range(order + 1)], dtype=float)
    omega = np.empty((config.m, order + 1), dtype=complex)
    for i, (zi, mu) in enumerate(config.pairs()):
        d = xi - zi
        q = np.empty(order + 1, dtype=complex)
        q[0] = series[0] / d
        for r in range(1, order + 1):
            q[r] = (series[r] - q[r - 1]) / d
        omega[i] = -mu * q * fact
    return series * fact, omega


def system_blocks(config: ZeroConfig, xi, nu):
    """Residual vector and full derivative blocks of the critical-point system.

    Returns ``(F, D_zeros, D_xi)`` where ``F[r] = p^(l)(xi_j)`` for the r-th
    pair ``(j, l)``, ``D_zeros[r, i] = Omega_i^(l)(xi_j)`` for every zero and
    ``D_xi[r, j'] = delta_{j j'} p^(l+1)(xi_j)``.
    """
    xi = np.asarray(xi, dtype=complex)
    rows = sum(nu)
    F = np.empty(rows, dtype=complex)
    dz = np.empty((rows, config.m), dtype=complex)
    dxi = np.zeros((rows, len(nu)), dtype=complex)
    r = 0
    for j, (x, v) in enumerate(zip(xi, nu)):
        pder, omega = _series_at(config, x, v + 1)
        for ell in range(1, v + 1):
            F[r] = pder[ell]
            dz[r] = omega[:, ell]
            dxi[r, j] = pder[ell + 1]
            r += 1
    return F, dz, dxi


def system_residual(config: ZeroConfig, xi, nu) -> np.ndarray:
    return system_blocks(config, xi, nu)[0]


def residual_scales(config: ZeroConfig, xi, nu) -> np.ndarray:
    """Rounding-level magnitude of each equation, ``max(1, ||p^(l)||)`` near ``xi_j``.

    ``||p^(l)||`` is the coefficient-norm bound of ``p^(l)`` at ``xi_j``, i.e.
    the size of the terms whose cancellation produces that equation.
    """
    from .cpoly import derivative_scale, expand

    coeffs = expand(config).coeffs
    out = [max(1.0, derivative_scale(coeffs, x, ell))
           for x, v in zip(np.asarray(xi, dtype=complex), nu) for ell in range(1, v + 1)]
    return np.array(out, dtype=float)


def residual_scale(config: ZeroConfig, xi, nu) -> float:
    """Largest of :func:`residual_scales`, the ``max(1, ||p||)`` of the whole system."""
    return float(residual_scales(config, xi, nu).max(initial=1.0))


@dataclass
class ImplicitJacobian:
    matrix: np.ndarray
    s: int
    k: int
    nu: tuple
    singular_values: np.ndarray = field(repr=False)

    @property
    def row_labels(self) -> list:
        return [(j, ell) for j, v in enumerate(self.nu) for ell in range(1, v + 1)]

    @property
    def column_labels(self) -> list:
        return [("z", i) for i in range(self.s)] + [("xi", j) for j in range(self.k)]


@dataclass(frozen=True)
class RankCertificate:
    rank: int
    sigma_min: float
    sigma_max: float
    threshold: float
    size: int = 0

    @property
    def margin(self) -> float:
        return self.sigma_min / self.sigma_max if self.sigma_max > 0 else 0.0

    @property
    def full(self) -> bool:
        return self.rank == self.size


def _singular_values(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge: {exc}") from exc


def assemble(config: ZeroConfig, crit, structural: bool = True, verify: bool = False) -> ImplicitJacobian:
    """Assemble the ``(m-1) x (m-1)`` Jacobian at ``(config, crit)``.

    With ``structural=True`` the xi-columns keep only the entries
    ``p^(nu_j+1)(xi_j)`` (the exact form at a solution); ``structural=False``
    returns the full derivative, which Newton iterations need off the
    solution set. ``verify=True`` cross-checks every entry against central
    finite differences and raises :class:`NumericError` on disagreement.
    """
    xi, nu = _second_kind(crit)
    s = _check_shapes(config, nu)
    if len(nu) == 0:
        matrix = np.zeros((0, 0), dtype=complex)
    else:
        _, dz, dxi = system_blocks(config, xi, nu)
        if structural:
            mask = np.zeros_like(dxi, dtype=bool)
            r = -1
            for j, v in enumerate(nu):
                r += v
                mask[r, j] = True
            dxi = np.where(mask, dxi, 0)
        matrix = np.hstack([dz[:, :s], dxi])
    jac = ImplicitJacobian(matrix, s, len(nu), nu, _singular_values(matrix))
    if verify:
        err = fd_mismatch(jac, config, crit)
        if err > FD_RTOL:
            raise NumericError(f"Jacobian disagrees with finite differences (relative error {err:.3e})")
    return jac


def fd_jacobian(config: ZeroConfig, crit, step: float = FD_STEP) -> np.ndarray:
    """Central finite-difference Jacobian of ``(z_1..z_s, xi) -> (p^(l)(xi_j))``.

    The map is holomorphic, so the difference quotient along ``+-h`` and
    ``+-ih`` is combined; the ``h**2`` error terms of the two directions
    cancel.
    """
    xi, nu = _second_kind(crit)
    s = _check_shapes(config, nu)
    zeros = config.array

    def shifted(c, delta):
        z, x = zeros.copy(), xi.copy()
        if c < s:
            z[c] += delta
        else:
            x[c - s] += delta
        return system_residual(config.with_locations(z), x, nu)

    cols = []
    for c in range(s + len(nu)):
        real_dir = shifted(c, step) - shifted(c, -step)
        imag_dir = shifted(c, 1j * step) - shifted(c, -1j * step)
        cols.append((real_dir - 1j * imag_dir) / (4 * step))
    if not cols:
        return np.zeros((0, 0), dtype=complex)
    return np.column_stack(cols)


def fd_mismatch(jac: ImplicitJacobian, config: ZeroConfig, crit, step: float = FD_STEP) -> float:
    """Largest entrywise relative difference between ``jac`` and finite differences.

    Each difference is divided by ``max(|J_ij|, |FD_ij|, 1e-4 * max|J|)``.
    With ``h = 1e-6`` the differences carry rounding noise near
    ``eps * ||F|| / h``, about ``1e-10 * max|J|``, so entries far below the
    matrix scale (in particular the structural zeros) are compared on that
    absolute floor.
    """
    fd = fd_jacobian(config, crit, step)
    if fd.size == 0:
        return 0.0
    a = jac.matrix
    floor = 1e-4 * max(np.abs(a).max(), np.abs(fd).max())
    denom = np.maximum(np.maximum(np.abs(a), np.abs(fd)), floor)
    denom = np.where(denom > 0, denom, 1.0)
    return float((np.abs(a - fd) / denom).max())


def rank_certificate(jac, threshold: float = DEFAULT_TOL.rank_threshold) -> RankCertificate:
    """SVD rank with a relative threshold; the margin is ``sigma_min / sigma_max``."""
    if isinstance(jac, ImplicitJacobian):
        sv = jac.singular_values
        size = jac.matrix.shape[1]
    else:
        matrix = np.asarray(jac, dtype=complex)
        sv = _singular_values(matrix)
        size = matrix.shape[1] if matrix.ndim == 2 else 0
    if sv.size == 0:
        return RankCertificate(0, 0.0, 0.0, threshold, size)
    if not np.all(np.isfinite(sv)):
        raise NumericError("non-finite singular values")
    smax = float(sv[0])
    rank = int(np.count_nonzero(sv > threshold * smax)) if smax > 0 else 0
    return RankCertificate(rank, float(sv[-1]), smax, threshold, size)


@dataclass
class SweepRecord:
    index: int
    seed: int
    config: ZeroConfig
    margin: float
    full_rank: bool
    error: str | None = None


@dataclass
class SweepReport:
    stratum: Structure
    records: list

    @property
    def min_margin(self) -> float:
        margins = [r.margin for r in self.records if r.error is None]
        return min(margins) if margins else float("nan")

    @property
    def deficient(self) -> list:
        return [r for r in self.records if r.error is None and not r.full_rank]

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.error is not None]


def sub_seed(seed: int, index: int) -> int:
    """Deterministic per-sample seed derived from ``(seed, index)``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def _sweep_one(stratum: Structure, seed: int, index: int, tol: Tolerances) -> SweepRecord:
    from .sampler import sample_stratum

    sseed = sub_seed(seed, index)
    config, crit = sample_stratum(stratum, np.random.default_rng(sseed), tol=tol)
    cert = rank_certificate(assemble(config, crit), tol.rank_threshold)
    full = cert.rank == stratum.m - 1 and cert.margin > 1e-8
    return SweepRecord(index, sseed, config, cert.margin, full)


def rank_sweep(stratum: Structure, samples: int, seed: int, tol: Tolerances = DEFAULT_TOL,
               threads: int | None = None) -> SweepReport:
    """Sample the stratum and certify the rank of the Jacobian at every sample.

    A sample is flagged when its numerical rank is below ``m - 1`` or its
    margin ``sigma_min / sigma_max`` is at most ``1e-8``. Each sample uses its
    own seed derived from ``(seed, index)``, so the report does not depend on
    ``threads``.
    """
    from .parallel import parallel_map

    def task(index):
        try:
            return _sweep_one(stratum, seed, index, tol)
        except NumericError as exc:
            return SweepRecord(index, sub_seed(seed, index), None, float("nan"), False, str(exc))

    records = parallel_map(task, range(samples), threads)
    return SweepReport(stratum, records)
