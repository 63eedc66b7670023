"""The Sendov objectives and the single-critical-point centroid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cpoly import DEFAULT_TOL, CriticalSet, Tolerances, ZeroConfig, critical_points
from ..errors import ContractError


@dataclass(frozen=True)
class SendovValue:
    """``value = |z_i - zeta_j|`` with ``i = attaining_zero_index`` and ``j = attaining_crit_index``.

    For :func:`sendov_S` the critical index refers to ``crit.all_locations``
    (first kind, then second kind); for :func:`sendov_S_ell` it refers to the
    second-kind list.
    """

    value: float
    attaining_zero_index: int
    attaining_crit_index: int


def sendov_S(config: ZeroConfig, crit: CriticalSet | None = None, tol: Tolerances = DEFAULT_TOL) -> SendovValue:
    """``max_i min_j |z_i - zeta_j|`` over every distinct zero and every root of ``p'``.

    A zero of multiplicity at least two is itself a critical point, so its
    inner minimum is zero.
    """
    if config.n < 2:
        raise ContractError("S needs degree n >= 2")
    if crit is None:
        crit = critical_points(config, tol)
    zeta = crit.all_locations
    first_index = {}
    for j, (loc, _) in enumerate(crit.first_kind):
        first_index[complex(loc)] = j
    best = SendovValue(-1.0, -1, -1)
    for i, (z, mu) in enumerate(config.pairs()):
        if mu >= 2:
            cand = SendovValue(0.0, i, first_index[complex(z)])
        else:
            d = np.abs(zeta - z)
            j = int(np.argmin(d))
            cand = SendovValue(float(d[j]), i, j)
        if cand.value > best.value:
            best = cand
    return best


def sendov_S_ell(config: ZeroConfig, ell: int, crit: CriticalSet | None = None,
                 tol: Tolerances = DEFAULT_TOL) -> SendovValue:
    """``min_j |z_ell - xi_j|`` over the second-kind critical points only."""
    if not 0 <= ell < config.m:
        raise ContractError(f"zero index {ell} out of range")
    if config.multiplicities[ell] != 1:
        raise ContractError(f"S_ell needs a simple zero, z_{ell} has multiplicity {config.multiplicities[ell]}")
    if crit is None:
        crit = critical_points(config, tol)
    if crit.k == 0:
        raise ContractError("no second-kind critical points")
    d = np.abs(crit.xi - config.locations[ell])
    j = int(np.argmin(d))
    return SendovValue(float(d[j]), ell, j)


def centroid_weights(config: ZeroConfig) -> np.ndarray:
    """``(n - mu_i) / (m - 1)`` for every zero."""
    if config.m < 2:
        raise ContractError("centroid weights need m >= 2")
    return (config.n - config.mu) / (config.m - 1)


def centroid_xi(config: ZeroConfig, check: bool = True, tol: Tolerances = DEFAULT_TOL) -> complex:
    """The single second-kind point of a ``k = 1`` configuration, ``sum_i mu~_i z_i / n``.

    With ``check=True`` the configuration is classified first and anything
    other than exactly one second-kind point is a contract error.
    """
    if config.m < 2:
        raise ContractError("a k = 1 stratum needs m >= 2")
    if check:
        crit = critical_points(config, tol)
        if crit.k != 1:
            raise ContractError(f"centroid formula needs k = 1, configuration has k = {crit.k}")
    return complex(np.dot(centroid_weights(config), config.array) / config.n)
