"""Search drivers for large values of the Sendov objectives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cpoly import DEFAULT_TOL, Tolerances, ZeroConfig, critical_points
from ..errors import ContractError, NumericError
from .objective import sendov_S, sendov_S_ell

BOUND_SLACK = 1e-9
EPS_REPORT = 1e-3
ACCEPT_MARGIN = 1e-12
CHUNK = 4096


@dataclass(frozen=True)
class Finding:
    """A configuration worth keeping: ``S`` (or ``S_ell``) above a threshold."""

    kind: str
    value: float
    config: ZeroConfig
    source: str

    @property
    def violation(self) -> bool:
        return self.value > 1 + BOUND_SLACK


@dataclass
class SearchResult:
    best: ZeroConfig
    ell: int
    trace: list
    accepted: int
    proposals: int
    degeneracies: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    max_S: float = float("nan")
    kkt: object = None

    @property
    def best_value(self) -> float:
        return self.trace[-1]


def _disk_offsets(rng, size: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(2j * math.pi * rng.random(size))


def _project(z: np.ndarray) -> np.ndarray:
    mod = np.abs(z)
    return np.where(mod > 1, z / np.where(mod > 0, mod, 1), z)


def local_search(config: ZeroConfig, ell: int, steps: int, seed: int, step: float = 1e-2,
                 patience: int = 50, min_step: float = 1e-6, tol: Tolerances = DEFAULT_TOL) -> SearchResult:
    """Projected random ascent on ``S_ell``.

    Each proposal moves every zero by an independent uniform offset of size at
    most ``step`` and projects zeros outside the unit disk radially onto the
    circle. A proposal is accepted when it raises ``S_ell`` by more than
    ``1e-12``; after ``patience`` consecutive rejections the step is halved.
    Proposals that collide or land on a stratum boundary are recorded and
    the search continues from the last accepted configuration with half the
    step. ``S`` is evaluated at every accepted configuration, and any value
    of ``S`` or ``S_ell`` above ``1 + 1e-9`` becomes a finding.
    """
    if config.m < 2:
        raise ContractError("local search needs m >= 2")
    if np.abs(config.array).max() > 1 + 1e-12:
        raise ContractError("zeros must lie in the closed unit disk")
    rng = np.random.default_rng(seed)
    current = config
    value = sendov_S_ell(current, ell, tol=tol).value
    result = SearchResult(current, ell, [value], 0, 0)
    result.max_S = sendov_S(current, tol=tol).value
    rejected = 0
    for _ in range(steps):
        result.proposals += 1
        moved = _project(current.array + _disk_offsets(rng, current.m, step))
        try:
            cand = current.with_locations(moved)
            crit = critical_points(cand, tol)
            new = sendov_S_ell(cand, ell, crit=crit, tol=tol).value
        except (ContractError, NumericError) as exc:
            result.degeneracies.append((result.proposals, step, str(exc)))
            step = max(step / 2, min_step)
            rejected = 0
            continue
        if new > value + ACCEPT_MARGIN:
            current, value = cand, new
            result.accepted += 1
            rejected = 0
            S = sendov_S(cand, crit=crit, tol=tol).value
            result.max_S = max(result.max_S, S)
            if S > 1 + BOUND_SLACK:
                result.findings.append(Finding("S", S, cand, "local_search"))
            if new > 1 + BOUND_SLACK:
                result.findings.append(Finding("S_ell", new, cand, "local_search"))
        else:
            rejected += 1
            if rejected >= patience:
                step = max(step / 2, min_step)
                rejected = 0
        result.trace.append(value)
    result.best = current
    result.kkt = _kkt_diagnostics(current, ell, tol)
    return result


def _kkt_diagnostics(config: ZeroConfig, ell: int, tol: Tolerances):
    from .kkt import fit_multipliers

    if config.m < 3:
        return None
    try:
        return fit_multipliers(config, ell, tol=tol)
    except (ContractError, NumericError):
        return None


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass
class MonteCarloResult:
    n: int
    samples: int
    seed: int
    max_S: float
    argmax: ZeroConfig
    screened_max: float
    findings: list
    rechecks: int


def _poly_batch(z: np.ndarray) -> np.ndarray:
    """Monic coefficients (highest first) of ``prod (x - z_i)`` for each row of ``z``."""
    B, n = z.shape
    c = np.zeros((B, n + 1), dtype=complex)
    c[:, 0] = 1
    for i in range(n):
        c[:, 1 : i + 2] = c[:, 1 : i + 2] - z[:, i : i + 1] * c[:, : i + 1]
    return c


def _critical_batch(z: np.ndarray) -> np.ndarray:
    """Roots of ``p'`` for each row: companion eigenvalues plus two Newton steps."""
    B, n = z.shape
    c = _poly_batch(z)
    d = c[:, :-1] * np.arange(n, 0, -1)  # p', leading coefficient n
    d = d / d[:, :1]
    deg = n - 1
    if deg == 1:
        return -d[:, 1:2]
    comp = np.zeros((B, deg, deg), dtype=complex)
    comp[:, 0, :] = -d[:, 1:]
    comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1
    roots = np.linalg.eigvals(comp)
    dd = d[:, :-1] * np.arange(deg, 0, -1)
    for _ in range(2):
        val = np.zeros_like(roots)
        der = np.zeros_like(roots)
        for k in range(deg + 1):
            val = val * roots + d[:, k : k + 1]
            if k < deg:
                der = der * roots + dd[:, k : k + 1]
        safe = np.abs(der) > 1e-12 * np.maximum(1, np.abs(val))
        roots = np.where(safe, roots - val / np.where(safe, der, 1), roots)
    return roots


def screen_S(z: np.ndarray) -> np.ndarray:
    """Approximate ``S`` for each row of zeros (simple zeros assumed)."""
    crit = _critical_batch(z)
    dist = np.abs(z[:, :, None] - crit[:, None, :])
    return dist.min(axis=2).max(axis=1)


def _exact_S(z: np.ndarray, tol: Tolerances):
    try:
        cfg = ZeroConfig.simple(z, tau_sep=tol.tau_sep)
        return cfg, sendov_S(cfg, tol=tol).value
    except (ContractError, NumericError):
        return None, float("nan")


def monte_carlo(n: int, samples: int, seed: int, eps_report: float = EPS_REPORT, chunk: int = CHUNK,
                threads: int | None = None, tol: Tolerances = DEFAULT_TOL) -> MonteCarloResult:
    """Sample ``n`` zeros i.i.d. area-uniformly in the unit disk and track the largest ``S``.

    ``S`` is screened in batches from companion-matrix eigenvalues; the
    screened maximum of every chunk and every sample with screened
    ``S > 1 - eps_report`` are recomputed with :func:`sendov_S`. Those above
    the threshold become findings. Chunk ``c`` draws from its own generator
    seeded by ``(seed, c)``, so the result does not depend on ``threads``.
    """
    from ..parallel import parallel_map

    if n < 2:
        raise ContractError("monte_carlo needs n >= 2")
    if samples < 1:
        raise ContractError("monte_carlo needs at least one sample")
    starts = list(range(0, samples, chunk))

    def run_chunk(c):
        size = min(chunk, samples - starts[c])
        rng = np.random.default_rng(np.random.SeedSequence([seed, c]))
        z = np.sqrt(rng.random((size, n))) * np.exp(2j * math.pi * rng.random((size, n)))
        S = screen_S(z)
        top = int(np.argmax(S))
        picks = sorted(set([top]) | set(np.flatnonzero(S > 1 - eps_report).tolist()))
        out = []
        for idx in picks:
            cfg, exact = _exact_S(z[idx], tol)
            out.append((idx, float(S[idx]), cfg, exact))
        return float(S[top]), out

    chunks = parallel_map(run_chunk, range(len(starts)), threads)
    best_val, best_cfg, screened, findings, rechecks = -1.0, None, -1.0, [], 0
    for screened_max, picks in chunks:
        screened = max(screened, screened_max)
        for _, approx, cfg, exact in picks:
            rechecks += 1
            value = exact if cfg is not None else approx
            if cfg is not None and value > best_val:
                best_val, best_cfg = value, cfg
            if value > 1 - eps_report and cfg is not None:
                findings.append(Finding("S", value, cfg, f"monte_carlo(n={n}, seed={seed})"))
    return MonteCarloResult(n, samples, seed, best_val, best_cfg, screened, findings, rechecks)
