"""Random configurations on a prescribed stratum.

Strata with repeated critical points have measure zero, so they cannot be
hit by sampling zeros directly. The construction used here:

1. pick distinct critical points ``xi_j`` and integrate
   ``P' = m * prod (z - xi_j) ** nu_j``; with a random constant the ``m``
   zeros of ``P`` are simple, which puts ``P`` on the stratum ``(1^m, nu)``;
2. deform the zero weights from ``1`` to the target multiplicities ``mu``
   while keeping the critical pattern, by Newton continuation on the
   weighted logarithmic derivative ``sum_i w_i / (z - z_i)`` with the last
   ``k + 1`` zeros held fixed;
3. normalise into the unit disk and polish with the corrector on the exact
   critical-point system.
"""

from __future__ import annotations

import math

import numpy as np

from .continuation import ImplicitState, correct
from .cpoly import DEFAULT_TOL, CriticalSet, Tolerances, ZeroConfig, aberth, closest_pair, critical_points
from .errors import ContractError, NumericError, SamplerError
from .strata import Structure

MAX_RETRIES = 25


def _deflate(R: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Rows ``R / (z - r)`` for every ``r`` in ``roots`` (exact division assumed)."""
    d = R.size - 1
    out = np.empty((roots.size, d), dtype=complex)
    acc = np.zeros(roots.size, dtype=complex)
    for idx in range(d):
        acc = acc * roots + R[idx]
        out[:, idx] = acc
    return out


def _deriv_rows(C: np.ndarray, x: complex, ell: int) -> np.ndarray:
    """``ell``-th derivative at ``x`` of every row polynomial of ``C`` (highest degree first)."""
    d = C.shape[1] - 1
    if ell > d:
        return np.zeros(C.shape[0], dtype=complex)
    powers = np.arange(d - ell, -1, -1)
    weights = np.array([math.perm(p + ell, ell) for p in powers], dtype=float)
    return C[:, : d - ell + 1] @ (weights * x ** powers)


def _weighted_system(zeros, xi, w, nu, s):
    """Residual and Jacobian of ``g_w^(l)(xi_j) = 0`` (``l < nu_j``) in ``(z_1..z_s, xi)``."""
    m = zeros.size
    R = np.poly(zeros)
    omega = _deflate(R, zeros)  # omega_i = R / (z - z_i)
    W = w.sum()
    g = (w[:, None] * omega).sum(axis=0)[None, :] / W
    rows = sum(nu)
    F = np.empty(rows, dtype=complex)
    J = np.zeros((rows, s + len(nu)), dtype=complex)
    if s:
        # dg/dz_i = -(g - w_i omega_i / W) / (z - z_i)
        rest = g - (w[:s, None] * omega[:s]) / W
        H = np.vstack([_deflate(rest[i], zeros[i : i + 1]) for i in range(s)])
    r = 0
    for j, (x, v) in enumerate(zip(xi, nu)):
        for ell in range(v):
            F[r] = _deriv_rows(g, x, ell)[0]
            J[r, s + j] = _deriv_rows(g, x, ell + 1)[0]
            if s:
                J[r, :s] = -_deriv_rows(H, x, ell)
            r += 1
    return F, J


def _newton_weighted(zeros, xi, w, nu, s, maxiter=20):
    zeros = zeros.copy()
    xi = xi.copy()
    for _ in range(maxiter):
        F, J = _weighted_system(zeros, xi, w, nu, s)
        res = np.abs(F).max()
        if res <= 1e-13 * max(1.0, np.abs(J).max()):
            return zeros, xi
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SamplerError("singular weighted system") from exc
        if not np.all(np.isfinite(delta)):
            raise SamplerError("non-finite Newton step")
        zeros[:s] += delta[:s]
        xi = xi + delta[s:]
    raise SamplerError("weighted Newton did not converge")


def _min_sep(zeros, xi) -> float:
    pts = np.concatenate([zeros, xi])
    pair = closest_pair(pts)
    return pair[2] if pair else np.inf


def _weight_homotopy(zeros, xi, mu, nu, s):
    w0 = np.ones(zeros.size)
    target = np.asarray(mu, dtype=float)
    t, dt = 0.0, 0.25
    velocity = None  # secant direction d(unknowns)/dt from the last accepted step
    while t < 1.0:
        step = min(dt, 1.0 - t)
        w = w0 + (t + step) * (target - w0)
        guess_z, guess_x = zeros.copy(), xi.copy()
        if velocity is not None:
            guess_z[:s] += step * velocity[:s]
            guess_x = guess_x + step * velocity[s:]
        try:
            new_zeros, new_xi = _newton_weighted(guess_z, guess_x, w, nu, s)
            sep = _min_sep(zeros, xi)
            moved = max(np.abs(new_zeros - guess_z).max(), np.abs(new_xi - guess_x).max(initial=0.0))
            if moved > 0.3 * sep or _min_sep(new_zeros, new_xi) < 1e-3:
                raise SamplerError("homotopy step jumped")
        except SamplerError:
            dt /= 2
            if dt < 1e-3:
                raise
            continue
        velocity = np.concatenate([new_zeros[:s] - zeros[:s], new_xi - xi]) / step
        zeros, xi, t = new_zeros, new_xi, t + step
        dt = min(2 * dt, 0.5)
    return zeros, xi


def _disk_point(rng, radius=1.0) -> complex:
    r = radius * math.sqrt(rng.random())
    return r * complex(math.cos(2 * math.pi * rng.random()), math.sin(2 * math.pi * rng.random()))


def _base_configuration(stratum: Structure, rng):
    """``m`` simple zeros whose derivative has critical points of multiplicities ``nu``."""
    m, nu = stratum.m, stratum.nu
    xi = []
    while len(xi) < len(nu):
        cand = _disk_point(rng, 0.6)
        if all(abs(cand - x) > 0.15 for x in xi):
            xi.append(cand)
    xi = np.array(xi, dtype=complex)
    dP = np.array([1.0 + 0j])
    for x, v in zip(xi, nu):
        for _ in range(v):
            dP = np.convolve(dP, [1.0, -x])
    P = np.polyint(dP * m)
    anchor = _disk_point(rng, 1.0)
    P[-1] = -np.polyval(P, anchor)
    zeros = aberth(P)
    return rng.permutation(zeros), xi


def sample_stratum(stratum: Structure, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL,
                   max_retries: int = MAX_RETRIES):
    """Return ``(config, crit)`` with ``config`` on ``stratum``.

    ``crit.second_kind`` follows the order of ``stratum.nu``. The zeros are
    normalised so that they fit in the closed unit disk with the farthest
    one on the unit circle.
    """
    if stratum.m < 2:
        raise ContractError("sampling needs m >= 2")
    s, nu = stratum.s, stratum.nu
    last = None
    for _ in range(max_retries):
        try:
            zeros, xi = _base_configuration(stratum, rng)
            if _min_sep(zeros, xi) < 1e-2:
                raise SamplerError("base configuration too clustered")
            if any(mu != 1 for mu in stratum.mu):
                zeros, xi = _weight_homotopy(zeros, xi, stratum.mu, nu, s)
            centre = zeros.mean()
            scale = np.abs(zeros - centre).max()
            zeros = (zeros - centre) / scale
            xi = (xi - centre) / scale
            config = ZeroConfig(tuple(zeros), stratum.mu, tau_sep=tol.tau_sep)
            state = ImplicitState(config, tuple(xi), stratum)
            state = correct(state, tol)
            check = critical_points(state.config, tol)
            if sorted(check.nu) != sorted(nu):
                raise SamplerError(f"classified as nu={check.nu}, wanted {nu}")
            found = check.xi
            for x in state.xi:
                if np.abs(found - x).min() > 1e-8:
                    raise SamplerError("critical points drifted during polishing")
            crit = CriticalSet(check.first_kind, tuple(zip(state.xi, nu)))
            return state.config, crit
        except (NumericError, ContractError) as exc:
            last = exc
    raise SamplerError(f"could not sample stratum {stratum} after {max_retries} attempts: {last}")


def sample_state(stratum: Structure, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL) -> ImplicitState:
    config, crit = sample_stratum(stratum, rng, tol)
    return ImplicitState(config, tuple(crit.xi), stratum, 0.0)


def enumerate_strata(max_m: int, mu_patterns=("ones", "double-first")) -> list:
    """Strata with ``2 <= m <= max_m``, every critical partition, and the given zero patterns.

    ``"ones"`` is ``mu = 1^m``; ``"double-first"`` makes ``z_1`` a double
    zero; ``"double-last"`` makes ``z_m`` a double zero.
    """
    from .strata import partitions

    out = []
    for m in range(2, max_m + 1):
        for nu in partitions(m - 1):
            for pattern in mu_patterns:
                mu = [1] * m
                if pattern == "double-first":
                    mu[0] = 2
                elif pattern == "double-last":
                    mu[-1] = 2
                elif pattern != "ones":
                    raise ContractError(f"unknown multiplicity pattern {pattern!r}")
                out.append(Structure(tuple(mu), nu))
    return out
