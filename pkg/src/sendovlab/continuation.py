"""Tracking critical points as free zeros move.

Inside a stratum the first ``s`` zeros and the ``k`` second-kind critical
points are locally analytic functions of the last ``k + 1`` zeros. This module
follows those functions numerically: a tangent predictor followed by a Newton
corrector on the critical-point system, with step halving on failure.

The map from free zeros to the full tuple ``(z_1..z_m, xi_1..xi_k)`` is what
:class:`ImplicitState` holds; tracking stops (with the last good state) when
the stratum degenerates, i.e. the Jacobian loses rank or two points collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cpoly import DEFAULT_TOL, Tolerances, ZeroConfig, closest_pair, critical_points, transform
from .errors import BasinError, BoundaryError, ContractError, MinStepError, NumericError
from .jacobian import residual_scales, system_blocks
from .strata import Structure

NEWTON_RTOL = 1e-12
BOUNDARY_RATIO = 1e-10
MIN_STEP = 1e-9
MAX_NEWTON = 25


@dataclass(frozen=True)
class ImplicitState:
    config: ZeroConfig
    xi: tuple
    stratum: Structure
    residual: float = float("nan")
    t: float = 0.0

    @classmethod
    def from_config(cls, config: ZeroConfig, tol: Tolerances = DEFAULT_TOL) -> "ImplicitState":
        crit = critical_points(config, tol)
        stratum = Structure(config.multiplicities, crit.nu)
        res = float(np.abs(system_blocks(config, crit.xi, crit.nu)[0]).max(initial=0.0))
        return cls(config, tuple(complex(x) for x in crit.xi), stratum, res)

    @property
    def s(self) -> int:
        return self.stratum.s

    @property
    def nu(self) -> tuple:
        return self.stratum.nu

    @property
    def dependent(self) -> np.ndarray:
        return self.config.array[: self.s]

    @property
    def free(self) -> np.ndarray:
        return self.config.array[self.s:]

    @property
    def unknowns(self) -> np.ndarray:
        return np.concatenate([self.dependent, np.asarray(self.xi, dtype=complex)])

    def points(self) -> np.ndarray:
        return np.concatenate([self.config.array, np.asarray(self.xi, dtype=complex)])

    def min_separation(self) -> float:
        pair = closest_pair(self.points())
        return pair[2] if pair else float("inf")

    def output(self, which) -> complex:
        kind, idx = which
        if kind == "xi":
            return complex(self.xi[idx])
        if kind == "z":
            return complex(self.config.locations[idx])
        raise ContractError(f"unknown output kind {kind!r}")

    def to_record(self) -> dict:
        return {
            "t": self.t,
            "free": [complex(z) for z in self.free],
            "dependent": [complex(z) for z in self.dependent],
            "crit": [complex(x) for x in self.xi],
            "residual": self.residual,
        }


@dataclass(frozen=True)
class PathSpec:
    """Piecewise-linear path for the free zeros.

    The path starts at the state's current free zeros and passes through each
    waypoint in turn; ``max_step`` bounds the displacement of any free zero
    in a single continuation step.
    """

    waypoints: tuple
    max_step: float = 0.05

    def __post_init__(self):
        pts = tuple(tuple(complex(z) for z in w) for w in self.waypoints)
        for w in pts:
            if not all(np.isfinite(z.real) and np.isfinite(z.imag) for z in w):
                raise ContractError("non-finite waypoint")
        if not self.max_step > 0:
            raise ContractError("max_step must be positive")
        object.__setattr__(self, "waypoints", pts)


def _rebuild(state: ImplicitState, zeros, xi) -> ImplicitState:
    try:
        config = state.config.with_locations(zeros)
    except ContractError as exc:
        raise BoundaryError(f"zeros collided: {exc}", reason="zero-collision") from exc
    return replace(state, config=config, xi=tuple(complex(x) for x in xi))


def _check_separation(state: ImplicitState, tol: Tolerances):
    zeros = state.config.array
    xi = np.asarray(state.xi, dtype=complex)
    for j, x in enumerate(xi):
        d = np.abs(zeros - x)
        i = int(np.argmin(d))
        if d[i] <= tol.tau_sep:
            raise BoundaryError(
                f"critical point xi_{j} reached zero z_{i} (distance {d[i]:.3e})", reason=f"xi{j}-z{i}"
            )
    pair = closest_pair(xi)
    if pair is not None and pair[2] <= tol.tau_sep:
        i, j, d = pair
        raise BoundaryError(
            f"critical points xi_{i} and xi_{j} merged (distance {d:.3e})", reason=f"xi{i}-xi{j}"
        )


def _jacobians(state: ImplicitState):
    F, dz, dxi = system_blocks(state.config, state.xi, state.nu)
    s = state.s
    return F, np.hstack([dz[:, :s], dxi]), dz[:, s:]


def _check_rank(J: np.ndarray):
    if J.size == 0:
        return
    sv = np.linalg.svd(J, compute_uv=False)
    ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    if ratio < BOUNDARY_RATIO:
        raise BoundaryError(f"Jacobian lost rank (sigma_min/sigma_max = {ratio:.3e})", reason="rank")


def correct(state: ImplicitState, tol: Tolerances = DEFAULT_TOL, maxiter: int = MAX_NEWTON) -> ImplicitState:
    """Newton iteration on the critical-point system in the dependent unknowns.

    Converges when every equation satisfies
    ``|p^(l)(xi_j)| <= 1e-12 * max(1, ||p^(l)||)`` with the norm taken at
    ``xi_j`` (so the whole system meets ``1e-12 * max(1, ||p||)``). Raises
    :class:`BoundaryError` on a rank-deficient Jacobian or a collision and
    :class:`BasinError` when the residual is not driven down within
    ``maxiter`` iterations.
    """
    _check_separation(state, tol)
    nu = state.nu
    if not nu:
        return replace(state, residual=0.0)
    s = state.s
    eta = NEWTON_RTOL * residual_scales(state.config, state.xi, nu)
    start = None
    for _ in range(maxiter + 1):
        F, J, _ = _jacobians(state)
        rel = np.abs(F) / eta
        res = float(np.abs(F).max())
        if start is None:
            start = float(rel.max())
        if not np.all(np.isfinite(rel)) or rel.max() > 1e6 * max(start, 1.0):
            raise BasinError(f"Newton diverged (residual {res:.3e})")
        if rel.max() <= 1.0:
            state = replace(state, residual=res)
            _check_separation(state, tol)
            return state
        _check_rank(J)
        delta = np.linalg.solve(J, -F)
        zeros = state.config.array
        zeros[:s] += delta[:s]
        state = _rebuild(state, zeros, np.asarray(state.xi) + delta[s:])
    raise BasinError(f"Newton did not converge in {maxiter} iterations (residual {res:.3e}, {rel.max():.3g} x target)")


def _predict(state: ImplicitState, new_free: np.ndarray) -> ImplicitState:
    _, J, Jfree = _jacobians(state)
    dfree = new_free - state.free
    _check_rank(J)
    du = np.linalg.solve(J, -Jfree @ dfree) if J.size else np.zeros(0, dtype=complex)
    s = state.s
    zeros = state.config.array
    zeros[:s] += du[:s]
    zeros[s:] = new_free
    return _rebuild(state, zeros, np.asarray(state.xi) + du[s:])


def collision_radius(state: ImplicitState, direction) -> float:
    """First-order estimate of how far the free zeros can move along ``direction`` before two points meet.

    ``direction`` is either the index of one free zero (moved alone) or a
    complex vector over all free zeros. Every pair of tracked points (zeros
    and critical points) closes at the rate given by the tangent of the
    implicit map; the estimate is the smallest ratio of current separation
    to closing rate.
    """
    nfree = state.free.size
    if np.ndim(direction) == 0:
        if not 0 <= int(direction) < nfree:
            raise ContractError("variable_index out of range")
        d = np.zeros(nfree, dtype=complex)
        d[int(direction)] = 1.0
    else:
        d = np.asarray(direction, dtype=complex)
        if d.shape != (nfree,):
            raise ContractError(f"direction needs {nfree} entries")
    _, J, Jfree = _jacobians(state)
    s = state.s
    speed = np.zeros(state.config.m + len(state.xi), dtype=complex)
    speed[s:state.config.m] = d
    if J.size:
        _check_rank(J)
        du = np.linalg.solve(J, -Jfree @ d)
        speed[:s] = du[:s]
        speed[state.config.m:] = du[s:]
    pts = state.points()
    iu = np.triu_indices(pts.size, 1)
    sep = np.abs(pts[iu[0]] - pts[iu[1]])
    rate = np.abs(speed[iu[0]] - speed[iu[1]])
    with np.errstate(divide="ignore"):
        ratio = np.where(rate > 0, sep / rate, np.inf)
    return float(ratio.min())


def track(start: ImplicitState, path: PathSpec, tol: Tolerances = DEFAULT_TOL,
          min_step: float = MIN_STEP) -> list:
    """Follow the dependent zeros and critical points along ``path``.

    Returns the list of accepted states, starting with ``start`` and ending at
    the last waypoint. On a stratum boundary a :class:`BoundaryError` is
    raised whose ``trajectory`` holds every accepted state.
    """
    state = correct(start, tol)
    trajectory = [state]
    h = path.max_step
    seg_start = 0.0
    for w in path.waypoints:
        target = np.asarray(w, dtype=complex)
        if target.size != state.free.size:
            raise ContractError(f"waypoint has {target.size} coordinates, expected {state.free.size}")
        origin = state.free.copy()
        length = float(np.abs(target - origin).max())
        tau = 0.0
        last_error = None
        while tau < 1.0 and length > 0:
            dt = min(h / length, 1.0 - tau)
            new_free = origin + (tau + dt) * (target - origin)
            try:
                predicted = _predict(state, new_free)
                corrected = correct(predicted, tol)
                jump = float(np.abs(corrected.unknowns - predicted.unknowns).max(initial=0.0))
                if jump > 0.25 * state.min_separation():
                    raise BasinError(f"corrector jumped by {jump:.3e}")
            except (BasinError, BoundaryError, np.linalg.LinAlgError) as exc:
                last_error = exc
                h /= 2
                if h < min_step:
                    if isinstance(last_error, BoundaryError):
                        raise BoundaryError(
                            f"stratum boundary reached at t = {state.t:.6g}: {last_error}",
                            reason=last_error.reason,
                            trajectory=trajectory,
                        ) from last_error
                    raise MinStepError(
                        f"step size underflow at t = {state.t:.6g}: {last_error}", trajectory
                    ) from last_error
                continue
            tau = tau + dt if tau + dt < 1.0 else 1.0
            state = replace(corrected, t=seg_start + tau)
            trajectory.append(state)
            h = min(2 * h, path.max_step)
        seg_start += 1.0
    return trajectory


def transform_state(state: ImplicitState, rotation=0.0, scale=1.0, shift=0j) -> ImplicitState:
    factor = scale * np.exp(1j * rotation)
    config = transform(state.config, rotation, scale, shift)
    xi = tuple(complex(factor * x + shift) for x in state.xi)
    return replace(state, config=config, xi=xi)


@dataclass
class ScanResult:
    offsets: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    cr_residual: np.ndarray = field(repr=False)

    @property
    def max_residual(self) -> float:
        finite = self.cr_residual[np.isfinite(self.cr_residual)]
        return float(finite.max()) if finite.size else float("nan")


PAD = 2  # extra grid layers so every reported point has a centred stencil


def _central_derivative(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order centred difference along ``axis``; the outer ``PAD`` layers are dropped.

    The leading error term ``h**4 f^(5) / 30`` is the same in the ``x`` and
    ``i y`` directions for a holomorphic ``f``, so it cancels in
    ``d_y f - i d_x f`` and the residual estimate is ``O(h**6)``.
    """
    v = np.moveaxis(values, axis, 0)
    out = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    return np.moveaxis(out, 0, axis)


def scan_analyticity(state: ImplicitState, variable_index: int, radius: float, resolution: int,
                     output=("xi", 0), tol: Tolerances = DEFAULT_TOL, threads: int | None = None) -> ScanResult:
    """Track one output over a square grid of one free zero and measure ``d/d(conj z)``.

    The free zero ``variable_index`` is moved to every point of a
    ``resolution x resolution`` grid of half-width ``radius`` around its
    current value (plus two padding layers used only by the difference
    stencils), each time tracking from the centre. The Cauchy–Riemann
    residual ``|d_y f - i d_x f|`` is estimated by centred fourth-order
    differences. Unreachable grid points (stratum boundary) are marked
    invalid and the residuals that depend on them are NaN.
    """
    from .parallel import parallel_map

    if not 0 <= variable_index < state.free.size:
        raise ContractError("variable_index out of range")
    if resolution < 2:
        raise ContractError("resolution must be at least 2")
    if not radius > 0:
        raise ContractError("radius must be positive")
    state = correct(state, tol)
    offsets = np.linspace(-radius, radius, resolution)
    h = offsets[1] - offsets[0]
    padded = np.concatenate([offsets[0] - h * np.arange(PAD, 0, -1), offsets, offsets[-1] + h * np.arange(1, PAD + 1)])
    base = state.free
    size = padded.size

    def value_at(cell):
        iy, ix = divmod(cell, size)
        target = base.copy()
        target[variable_index] += padded[ix] + 1j * padded[iy]
        try:
            return track(state, PathSpec((tuple(target),), max_step=radius), tol)[-1].output(output)
        except NumericError:
            return complex(np.nan, np.nan)

    grid = np.array(parallel_map(value_at, range(size * size), threads), dtype=complex).reshape(size, size)
    d_dx = _central_derivative(grid, h, axis=1)[PAD:-PAD]
    d_dy = _central_derivative(grid, h, axis=0)[:, PAD:-PAD]
    residual = np.abs(d_dy - 1j * d_dx)
    values = grid[PAD:-PAD, PAD:-PAD]
    return ScanResult(offsets, values, np.isfinite(values), residual)
