"""Kuhn–Tucker conditions for the single-critical-point extremal problem.

For a configuration with one second-kind point ``xi = sum mu~_i z_i / n``
the problem is to maximise ``F_0 = |xi - z_i0|^2`` over zeros in the closed
unit disk, subject to ``f(z) = (z - xi)^(m-1) - (1/n) sum mu_i omega_i(z)``
vanishing identically. With multipliers ``lambda_1, lambda_2`` for the real
and imaginary parts of ``f`` (evaluated at ``z = xi``) and ``eta_i`` for the
disk constraints, the Lagrangian is

    F = F_0 - lambda_1 Re f - lambda_2 Im f - sum eta_i (|z_i|^2 - 1).

Writing ``z_i = a_i + i b_i`` and ``xi - z_i = c_i exp(i theta_i)``, the
stationarity equations ``dF/da_i = dF/db_i = 0`` are evaluated here in
trigonometric form, and again in the complex form obtained by combining
each pair; the two must agree, which is checked by :func:`kkt_residual`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..cpoly import DEFAULT_TOL, Tolerances, ZeroConfig
from ..errors import ContractError
from .objective import centroid_weights, centroid_xi

BOUNDARY_TOL = 1e-10


def _check_problem(config: ZeroConfig, i0: int, check: bool, tol: Tolerances) -> complex:
    if config.m < 3:
        raise ContractError("the Kuhn–Tucker system needs m >= 3")
    if not 0 <= i0 < config.m:
        raise ContractError(f"i0 = {i0} out of range")
    if config.multiplicities[i0] != 1:
        raise ContractError(f"i0 must be a simple zero, z_{i0} has multiplicity {config.multiplicities[i0]}")
    xi = centroid_xi(config, check=check, tol=tol)
    d = np.abs(xi - config.array)
    if d.min() <= tol.tau_sep:
        raise ContractError(f"zero {int(np.argmin(d))} coincides with xi")
    return xi


@dataclass(frozen=True)
class KKTState:
    """Multipliers plus the polar data of ``xi - z_i`` at one configuration.

    ``eta`` has one entry per zero (``eta[i0]`` is kept at zero by the
    fitter). ``c`` and ``theta`` are the product of the ``c_i`` and the sum
    of the ``theta_i``.
    """

    lam: float
    theta_lambda: float
    eta: tuple
    i0: int
    xi: complex
    c_i: tuple
    theta_i: tuple

    @classmethod
    def at(cls, config: ZeroConfig, i0: int, lam: float = 0.0, theta_lambda: float = 0.0, eta=None,
           check: bool = True, tol: Tolerances = DEFAULT_TOL) -> "KKTState":
        xi = _check_problem(config, i0, check, tol)
        if lam < 0:
            raise ContractError("lambda must be nonnegative")
        eta = tuple(float(e) for e in (np.zeros(config.m) if eta is None else eta))
        if len(eta) != config.m:
            raise ContractError(f"eta needs {config.m} entries")
        if min(eta) < 0:
            raise ContractError("eta must be nonnegative")
        diff = xi - config.array
        return cls(float(lam), float(theta_lambda) % (2 * math.pi), eta, i0, xi,
                   tuple(float(x) for x in np.abs(diff)),
                   tuple(float(x) for x in np.angle(diff) % (2 * math.pi)))

    @property
    def lambda1(self) -> float:
        return self.lam * math.cos(self.theta_lambda)

    @property
    def lambda2(self) -> float:
        return self.lam * math.sin(self.theta_lambda)

    @property
    def c(self) -> float:
        return float(np.prod(self.c_i))

    @property
    def theta(self) -> float:
        return float(np.sum(self.theta_i))

    def polar_error(self, config: ZeroConfig) -> float:
        rebuilt = np.asarray(self.c_i) * np.exp(1j * np.asarray(self.theta_i))
        return float(np.abs(rebuilt - (self.xi - config.array)).max())

    def slackness(self, config: ZeroConfig) -> float:
        """``max_i |eta_i (|z_i|^2 - 1)|``."""
        return float(np.abs(np.asarray(self.eta) * (np.abs(config.array) ** 2 - 1)).max())


@dataclass(frozen=True)
class KKTResidual:
    """Residuals of the stationarity system at one state.

    ``grad[i] = (dF/da_i, dF/db_i)``; ``complex_form[i]`` is the combined
    complex equation for zero ``i``; ``pair_lhs[i]`` (``i != i0``),
    ``pair_mid`` and ``pair_rhs`` are the three members of the consolidated
    identity that holds when every residual vanishes.
    """

    grad: np.ndarray
    complex_form: np.ndarray
    pair_lhs: np.ndarray
    pair_mid: complex
    pair_rhs: complex
    dual_gap: float
    i0_on_boundary: bool

    @property
    def vector(self) -> np.ndarray:
        """The ``2m`` real residuals ``(dF/da_1, dF/db_1, ..., dF/da_m, dF/db_m)``."""
        return self.grad.reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.abs(self.grad).max())


def _objective_part(config: ZeroConfig, state: KKTState) -> np.ndarray:
    n = config.n
    w = centroid_weights(config)
    coef = 2 * w / n
    coef[state.i0] = (2 * w[state.i0] - 2 * n) / n
    ci0, ti0 = state.c_i[state.i0], state.theta_i[state.i0]
    return np.column_stack([coef * ci0 * math.cos(ti0), coef * ci0 * math.sin(ti0)])


def _constraint_columns(config: ZeroConfig, state: KKTState):
    """Coefficients of ``lambda_1`` and ``lambda_2`` in ``(dF/da_i, dF/db_i)``."""
    mu = config.mu.astype(float)
    ci = np.asarray(state.c_i)
    phase = state.theta - 2 * np.asarray(state.theta_i)
    K = state.c * mu / (config.n * ci**2)
    lam1 = np.column_stack([K * np.cos(phase), -K * np.sin(phase)])
    lam2 = np.column_stack([K * np.sin(phase), K * np.cos(phase)])
    return lam1, lam2


def kkt_residual(config: ZeroConfig, state: KKTState) -> KKTResidual:
    """Evaluate the stationarity equations in both forms at ``z = xi``."""
    z = config.array
    if len(state.c_i) != config.m:
        raise ContractError("state does not belong to this configuration")
    n, mu = config.n, config.mu.astype(float)
    eta = np.asarray(state.eta)
    lam1, lam2 = _constraint_columns(config, state)
    grad = _objective_part(config, state) + state.lambda1 * lam1 + state.lambda2 * lam2
    grad -= 2 * eta[:, None] * np.column_stack([z.real, z.imag])

    # complex form, from the raw complex numbers rather than the polar data
    xi, i0 = state.xi, state.i0
    w = centroid_weights(config)
    weight = 2 * w / mu
    weight[i0] = (2 * w[i0] - 2 * n) / mu[i0]
    prod = np.prod(xi - z)
    rot = state.lam * np.exp(-1j * state.theta_lambda)
    cform = rot * prod / (xi - z) ** 2 + weight * np.conj(xi - z[i0]) - 2 * n * (eta / mu) * np.conj(z)
    gap = max(
        float(np.abs(cform.real - n * grad[:, 0] / mu).max()),
        float(np.abs(cform.imag + n * grad[:, 1] / mu).max()),
    )

    lhs = (xi - z) ** 2 * ((w / mu) * np.conj(xi - z[i0]) - n * (eta / mu) * np.conj(z))
    lhs[i0] = np.nan
    mid = (w[i0] - n) * (xi - z[i0]) ** 2 * np.conj(xi - z[i0])
    rhs = -0.5 * rot * prod
    on_boundary = abs(abs(z[i0]) - 1) <= BOUNDARY_TOL
    return KKTResidual(grad, cform, lhs, complex(mid), complex(rhs), gap, bool(on_boundary))


def lagrangian(config: ZeroConfig, state: KKTState, z_eval: complex | None = None) -> float:
    """``F`` with the multipliers of ``state`` held fixed.

    ``xi`` is recomputed from the centroid formula for ``config``; the
    constraint polynomial is evaluated at ``z_eval`` (default: ``state.xi``),
    so finite differences in the zeros reproduce the stationarity residuals.
    """
    zeros = config.array
    n, m, mu = config.n, config.m, config.mu
    xi = complex(np.dot(centroid_weights(config), zeros) / n)
    z = state.xi if z_eval is None else complex(z_eval)
    F0 = abs(xi - zeros[state.i0]) ** 2
    omega = np.array([np.prod(np.delete(z - zeros, i)) for i in range(m)])
    f = (z - xi) ** (m - 1) - np.dot(mu, omega) / n
    penalty = np.dot(np.asarray(state.eta), np.abs(zeros) ** 2 - 1)
    return float(F0 - state.lambda1 * f.real - state.lambda2 * f.imag - penalty)


@dataclass(frozen=True)
class KKTFit:
    """Least-squares multipliers at a configuration.

    ``boundary`` lists the zeros on the unit circle whose ``eta_i`` were free
    (constrained to be nonnegative); every other ``eta_i`` is zero by
    complementary slackness. ``eta_i0`` is pinned to zero unless ``free_i0``
    is set and ``z_i0`` itself lies on the circle. ``consistent`` records whether the fitted
    multipliers solve the system to ``rtol`` of the objective gradient.
    """

    state: KKTState
    residual: KKTResidual
    boundary: tuple
    rms: float
    consistent: bool


def fit_multipliers(config: ZeroConfig, i0: int, rtol: float = 1e-8, free_i0: bool = False,
                    check: bool = True, tol: Tolerances = DEFAULT_TOL) -> KKTFit:
    """Recover ``(lambda, theta_lambda, eta)`` by bounded linear least squares.

    The stationarity equations are linear in the multipliers; ``lambda_1``
    and ``lambda_2`` are free, ``eta_i >= 0`` for zeros on the unit circle
    and ``eta_i = 0`` otherwise; ``eta_i0`` is zero unless ``free_i0`` is set.
    """
    from scipy.optimize import lsq_linear

    base = KKTState.at(config, i0, check=check, tol=tol)
    z = config.array
    boundary = tuple(
        i for i in range(config.m)
        if (i != i0 or free_i0) and abs(abs(z[i]) - 1) <= BOUNDARY_TOL
    )
    b0 = _objective_part(config, base).reshape(-1)
    lam1, lam2 = _constraint_columns(config, base)
    cols = [lam1.reshape(-1), lam2.reshape(-1)]
    for i in boundary:
        col = np.zeros((config.m, 2))
        col[i] = (-2 * z[i].real, -2 * z[i].imag)
        cols.append(col.reshape(-1))
    A = np.column_stack(cols)
    lower = np.array([-np.inf, -np.inf] + [0.0] * len(boundary))
    upper = np.full(A.shape[1], np.inf)
    sol = lsq_linear(A, -b0, bounds=(lower, upper), method="bvls", tol=1e-14)
    x = sol.x
    eta = np.zeros(config.m)
    for i, val in zip(boundary, x[2:]):
        eta[i] = max(val, 0.0)
    lam = math.hypot(x[0], x[1])
    theta_lambda = math.atan2(x[1], x[0]) % (2 * math.pi)
    state = KKTState.at(config, i0, lam, theta_lambda, eta, check=False, tol=tol)
    res = kkt_residual(config, state)
    rms = float(np.sqrt(np.mean(res.vector**2)))
    scale = max(1.0, float(np.abs(b0).max()))
    return KKTFit(state, res, boundary, rms, bool(res.norm <= rtol * scale))


# --------------------------------------------------------------------------
# half-plane certificate


@dataclass(frozen=True)
class HalfPlaneCert:
    """Both forms of the half-plane inequalities for one boundary zero.

    Values refer to the rotated configuration in which ``xi - z_i0`` is a
    negative real number: ``psi1 = (xi - z_i)^2``, ``psi2 = psi1 * conj(z_i)``,
    ``z_i = exp(i gamma)`` and ``xi - z_i = c_i exp(i theta)``.
    """

    psi1: complex
    psi2: complex
    gamma: float
    theta: float
    rotation: float
    conv1: bool
    conv2: bool
    trig1: bool
    trig2: bool
    degenerate: bool

    @property
    def algebraic(self) -> bool:
        return self.conv1 and self.conv2

    @property
    def trigonometric(self) -> bool:
        return self.trig1 and self.trig2

    @property
    def agree(self) -> bool:
        return self.algebraic == self.trigonometric


def conv_algebraic(psi1: complex, psi2: complex) -> tuple:
    """``(Im psi1 Im psi2 < 0, Re psi1 < Im psi1 / Im psi2 * Re psi2, degenerate)``."""
    psi1, psi2 = complex(psi1), complex(psi2)
    degenerate = abs(psi2.imag) <= 1e-14 * abs(psi2)
    # a degenerate Im psi2 is taken as exactly zero, so the strict product test fails
    first = (not degenerate) and psi1.imag * psi2.imag < 0
    second = (not degenerate) and psi1.real < psi1.imag / psi2.imag * psi2.real
    return bool(first), bool(second), bool(degenerate)


def conv_trigonometric(theta: float, gamma: float) -> tuple:
    """The same pair of inequalities written with ``sin``/``cos`` of ``2 theta`` and ``2 theta - gamma``."""
    s1, s2 = math.sin(2 * theta), math.sin(2 * theta - gamma)
    degenerate = abs(s2) <= 1e-14
    first = (not degenerate) and s1 * s2 < 0
    second = (not degenerate) and math.cos(2 * theta) < s1 / s2 * math.cos(2 * theta - gamma)
    return bool(first), bool(second), bool(degenerate)


def halfplane_cert(config: ZeroConfig, i: int, i0: int, check: bool = True,
                   tol: Tolerances = DEFAULT_TOL) -> HalfPlaneCert:
    """Certificate for boundary zero ``i`` relative to the distinguished zero ``i0``."""
    if i == i0:
        raise ContractError("i must differ from i0")
    if not 0 <= i < config.m:
        raise ContractError(f"zero index {i} out of range")
    z = config.array
    if abs(abs(z[i]) - 1) > BOUNDARY_TOL:
        raise ContractError(f"z_{i} is not on the unit circle (|z| = {abs(z[i])!r})")
    if not 0 <= i0 < config.m:
        raise ContractError(f"i0 = {i0} out of range")
    xi = centroid_xi(config, check=check, tol=tol)
    if abs(xi - z[i0]) <= tol.tau_sep:
        raise ContractError("xi coincides with z_i0, the normalising rotation is undefined")
    rotation = math.pi - float(np.angle(xi - z[i0]))
    r = np.exp(1j * rotation)
    xi_r, zi_r = xi * r, z[i] * r
    psi1 = (xi_r - zi_r) ** 2
    psi2 = psi1 * np.conj(zi_r)
    gamma = float(np.angle(zi_r)) % (2 * math.pi)
    theta = float(np.angle(xi_r - zi_r)) % (2 * math.pi)
    c1, c2, dg_a = conv_algebraic(psi1, psi2)
    t1, t2, dg_t = conv_trigonometric(theta, gamma)
    return HalfPlaneCert(complex(psi1), complex(psi2), gamma, theta, rotation % (2 * math.pi),
                         c1, c2, t1, t2, dg_a or dg_t)

