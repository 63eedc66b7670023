"""Complex polynomials given by their zeros.

A polynomial is always described by a :class:`ZeroConfig`, i.e. its distinct
zeros together with their multiplicities,

    p(z) = prod_i (z - z_i) ** mu_i,    sum_i mu_i = n.

Coefficients (:class:`PolyCoeffs`) are derived data, used for root finding and
for cross-checks. Critical points are split into zeros of the first kind
(multiple zeros of ``p``, which are zeros of ``p'`` of order ``mu_i - 1``) and
of the second kind (zeros of ``p'`` that are not zeros of ``p``).

The second-kind points are the roots of the monic reduced derivative

    g(z) = (1/n) * sum_i mu_i * prod_{j != i} (z - z_j),

because ``p'(z) = n * prod_i (z - z_i) ** (mu_i - 1) * g(z)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ContractError, DegeneracyError, RootFindingError

TAU_SEP = 1e-7
TAU_CLUSTER = 1e-8
MULT_TOL = 1e-10
MAX_DEGREE = 64


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by root finding and classification.

    ``tau_sep`` separates distinct zeros and second-kind points from zeros,
    ``tau_cluster`` (relative to ``max(1, |root|)``) merges roots outright, and
    ``mult_tol`` is the normwise level at which a cluster of ``t`` roots is
    accepted as one root of multiplicity ``t`` (all derivatives of order
    ``< t`` vanish at its centre).
    """

    tau_sep: float = TAU_SEP
    tau_cluster: float = TAU_CLUSTER
    mult_tol: float = MULT_TOL
    rank_threshold: float = 1e-10
    max_degree: int = MAX_DEGREE


DEFAULT_TOL = Tolerances()


def _as_complex(value) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ContractError(f"non-finite complex value {value!r}")
    return z


@dataclass(frozen=True)
class ZeroConfig:
    """Ordered distinct zeros with positive integer multiplicities.

    The order is significant (dependent zeros come first, see
    :mod:`sendovlab.continuation`) and is never changed by any operation.
    """

    locations: tuple
    multiplicities: tuple
    tau_sep: float = field(default=TAU_SEP, compare=False, repr=False)

    def __post_init__(self):
        locs = tuple(_as_complex(z) for z in self.locations)
        mults = []
        for mu in self.multiplicities:
            if isinstance(mu, (bool, np.bool_)) or int(mu) != mu or int(mu) < 1:
                raise ContractError(f"multiplicity must be a positive integer, got {mu!r}")
            mults.append(int(mu))
        if len(locs) != len(mults):
            raise ContractError("locations and multiplicities differ in length")
        if not locs:
            raise ContractError("a zero configuration needs at least one zero")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "multiplicities", tuple(mults))
        pair = closest_pair(locs)
        if pair is not None and pair[2] <= self.tau_sep:
            i, j, d = pair
            raise ContractError(
                f"zeros {i} and {j} are not distinct (|z_{i} - z_{j}| = {d:.3e} <= {self.tau_sep:g})"
            )

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], tau_sep: float = TAU_SEP) -> "ZeroConfig":
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), tau_sep=tau_sep)

    @classmethod
    def simple(cls, locations: Iterable, tau_sep: float = TAU_SEP) -> "ZeroConfig":
        locations = tuple(locations)
        return cls(locations, (1,) * len(locations), tau_sep=tau_sep)

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def m(self) -> int:
        return len(self.locations)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.locations, dtype=complex)

    @property
    def mu(self) -> np.ndarray:
        return np.array(self.multiplicities, dtype=float)

    def pairs(self):
        return list(zip(self.locations, self.multiplicities))

    def with_locations(self, locations) -> "ZeroConfig":
        return ZeroConfig(tuple(locations), self.multiplicities, tau_sep=self.tau_sep)


@dataclass(frozen=True)
class CriticalSet:
    """Distinct zeros of ``p'`` split by kind.

    ``first_kind`` lists ``(z_i, mu_i - 1)`` for the multiple zeros of ``p``,
    ``second_kind`` lists ``(xi_j, nu_j)``.
    """

    first_kind: tuple
    second_kind: tuple

    @property
    def k(self) -> int:
        return len(self.second_kind)

    @property
    def xi(self) -> np.ndarray:
        return np.array([loc for loc, _ in self.second_kind], dtype=complex)

    @property
    def nu(self) -> tuple:
        return tuple(nu for _, nu in self.second_kind)

    @property
    def all_locations(self) -> np.ndarray:
        """Every distinct root of ``p'``: first kind, then second kind."""
        return np.array(
            [loc for loc, _ in self.first_kind] + [loc for loc, _ in self.second_kind],
            dtype=complex,
        )

    @property
    def total_multiplicity(self) -> int:
        return sum(mult for _, mult in self.first_kind) + sum(self.nu)


@dataclass(frozen=True, eq=False)
class PolyCoeffs:
    """Dense monic coefficients, highest degree first (numpy ``polyval`` order)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ContractError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ContractError("non-finite coefficient")
        if c[0] != 1:
            raise ContractError(f"polynomial is not monic (leading coefficient {c[0]})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return np.polyval(self.coeffs, z)

    def __eq__(self, other):
        return isinstance(other, PolyCoeffs) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"PolyCoeffs({self.coeffs.tolist()})"


def closest_pair(points: Sequence[complex]):
    """Return ``(i, j, distance)`` for the closest pair, or None for < 2 points."""
    z = np.asarray(points, dtype=complex)
    if z.size < 2:
        return None
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    i, j = np.unravel_index(np.argmin(d), d.shape)
    i, j = sorted((int(i), int(j)))
    return i, j, float(d[i, j])


def roots_of_unity(n: int) -> ZeroConfig:
    if n < 1:
        raise ContractError("roots_of_unity needs n >= 1")
    return ZeroConfig.simple(cmath.exp(2j * math.pi * i / n) for i in range(n))


def expand(config: ZeroConfig, max_degree: int = MAX_DEGREE) -> PolyCoeffs:
    """Monic coefficients of ``prod (z - z_i) ** mu_i``."""
    if config.n > max_degree:
        raise CapacityError(f"degree {config.n} exceeds the maximum degree {max_degree}")
    c = np.array([1.0 + 0j])
    for z, mu in config.pairs():
        for _ in range(mu):
            c = np.convolve(c, [1.0, -z])
    return PolyCoeffs(c)


def taylor_coefficients(config: ZeroConfig, z, order: int) -> np.ndarray:
    """Taylor coefficients ``p^(k)(z) / k!`` for ``k = 0..order``, from the product form."""
    z = _as_complex(z)
    series = np.zeros(order + 1, dtype=complex)
    series[0] = 1.0
    for zi, mu in config.pairs():
        d = z - zi
        top = min(mu, order)
        fac = np.array([math.comb(mu, r) * d ** (mu - r) for r in range(top + 1)], dtype=complex)
        series = np.convolve(series, fac)[: order + 1]
    return series


def _factorials(order: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(order + 1)], dtype=float)


def eval_derivatives(config: ZeroConfig, z, max_order: int, method: str = "product") -> np.ndarray:
    """Values ``p(z), p'(z), ..., p^(max_order)(z)``.

    ``method="product"`` multiplies the truncated Taylor series of the
    factors ``(z - z_i) ** mu_i`` (Leibniz rule on the factored form);
    ``method="horner"`` uses repeated synthetic division on the expanded
    coefficients and serves as a cross-check.
    """
    if max_order < 0 or max_order > config.n:
        raise ContractError(f"max_order must lie in [0, n={config.n}], got {max_order}")
    if method == "product":
        taylor = taylor_coefficients(config, z, max_order)
    elif method == "horner":
        taylor = horner_taylor(expand(config).coeffs, z, max_order)
    else:
        raise ContractError(f"unknown method {method!r}")
    return taylor * _factorials(max_order)


def horner_taylor(coeffs, z, order: int) -> np.ndarray:
    """Taylor coefficients at ``z`` of a dense polynomial (highest degree first)."""
    z = _as_complex(z)
    a = np.array(coeffs, dtype=complex)
    out = np.zeros(order + 1, dtype=complex)
    for k in range(order + 1):
        if a.size == 0:
            break
        q = np.empty(a.size, dtype=complex)
        acc = 0j
        for idx, coef in enumerate(a):
            acc = acc * z + coef
            q[idx] = acc
        out[k] = q[-1]
        a = q[:-1]
    return out


def horner_derivatives(poly: PolyCoeffs, z, max_order: int) -> np.ndarray:
    return horner_taylor(poly.coeffs, z, max_order) * _factorials(max_order)


def derivative_scale(coeffs, z, order: int) -> float:
    """Natural magnitude of ``p^(order)`` near ``z``: its coefficient 1-norm times ``max(1,|z|)^deg``."""
    c = np.array(coeffs, dtype=complex)
    for _ in range(order):
        c = np.polyder(c)
    deg = max(c.size - 1, 0)
    return float(np.abs(c).sum()) * max(1.0, abs(z)) ** deg


# --------------------------------------------------------------------------
# root finding


def _initial_guesses(a: np.ndarray) -> np.ndarray:
    deg = a.size - 1
    centre = -a[1] / deg
    shifted = horner_taylor(a, centre, deg)[::-1]  # highest first, monic
    radius = 0.0
    for k in range(1, deg + 1):
        radius = max(radius, abs(shifted[k]) ** (1.0 / k))
    radius *= 2.0
    if radius == 0.0:
        return np.full(deg, centre, dtype=complex)
    angles = 2 * np.pi * np.arange(deg) / deg + 0.4
    return centre + radius * np.exp(1j * angles)


def backward_errors(coeffs, z) -> np.ndarray:
    a = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    num = np.abs(np.polyval(a, z))
    den = np.polyval(np.abs(a), np.abs(z))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / den, num)
    return out


def aberth(coeffs, maxiter: int = 1000, tol: float = 1e-10) -> np.ndarray:
    """All roots of a monic polynomial by Aberth–Ehrlich simultaneous iteration.

    Iterates until each root has componentwise backward error at rounding
    level, then checks the contract bound ``tol``.
    """
    a = np.array(coeffs, dtype=complex)
    deg = a.size - 1
    if deg < 1:
        raise ContractError("root finding needs degree >= 1")
    if deg == 1:
        return np.array([-a[1] / a[0]])
    da = np.polyder(a)
    z = _initial_guesses(a)
    if np.all(z == z[0]):
        return z
    stop = 4 * deg * np.finfo(float).eps
    done = np.zeros(deg, dtype=bool)
    for _ in range(maxiter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        za = z[act]
        pz = np.polyval(a, za)
        dpz = np.polyval(da, za)
        diff = za[:, None] - z[None, :]
        diff[np.arange(act.size), act] = np.inf
        sigma = (1.0 / diff).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            w = ratio / (1.0 - ratio * sigma)
        bad = ~np.isfinite(w)
        if bad.any():
            w[bad] = 1e-3 * (1 + np.abs(za[bad])) * np.exp(1j * np.arange(bad.sum()))
        z[act] = za - w
        small_step = np.abs(w) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z[act]), 1e-300)
        done[act] = (backward_errors(a, z[act]) <= stop) | small_step
    bw = backward_errors(a, z)
    worst = float(bw.max())
    if not np.all(np.isfinite(z)) or worst > tol:
        raise RootFindingError(
            f"Aberth iteration did not reach backward error {tol:g} (worst {worst:.3e})",
            best=z.copy(),
            residual=worst,
        )
    return z


def _cluster_radius(t: int, mult_tol: float) -> float:
    # a t-fold root perturbed at relative level eps spreads like eps**(1/t)
    return 8.0 * mult_tol ** (1.0 / t)


def group_roots(coeffs, raw, tol: Tolerances = DEFAULT_TOL) -> list:
    """Merge raw roots into ``(location, multiplicity)`` groups.

    A group of ``t`` nearby roots is accepted when all of them lie within
    ``tau_cluster`` of each other, or when every derivative of order ``< t``
    vanishes (normwise, at level ``mult_tol``) at the group's refined centre.
    The centre is the cluster mean refined by Newton steps on the ``(t-1)``-th
    derivative, for which the multiple root is simple.
    """
    a = np.array(coeffs, dtype=complex)
    z = np.asarray(raw, dtype=complex)
    deg = z.size
    table = [a]
    for _ in range(deg):
        table.append(np.polyder(table[-1]))
    norms = [float(np.abs(t).sum()) for t in table]

    def vanishes(c, t):
        r = max(1.0, abs(c))
        for j in range(t):
            bound = tol.mult_tol * norms[j] * r ** (deg - j)
            if abs(np.polyval(table[j], c)) > bound:
                return False
        return True

    def refine(c, t, radius):
        c0 = c
        for _ in range(4):
            num = np.polyval(table[t - 1], c)
            den = np.polyval(table[t], c)
            if den == 0:
                break
            step = num / den
            if abs(c - step - c0) > radius:
                return c0
            c = c - step
            if abs(step) <= 1e-16 * max(1.0, abs(c)):
                break
        return c

    unassigned = list(range(deg))
    groups = []
    while unassigned:
        i = unassigned[0]
        rest = np.array(unassigned)
        dist = np.abs(z[rest] - z[i])
        order = np.argsort(dist, kind="stable")
        cand = rest[order]
        dsort = dist[order]
        scale = max(1.0, abs(z[i]))
        members, centre = [i], z[i]
        for t in range(cand.size, 1, -1):
            if dsort[t - 1] <= tol.tau_cluster * scale:
                members = list(cand[:t])
                centre = z[cand[:t]].mean()
                break
            radius = _cluster_radius(t, tol.mult_tol) * scale
            if dsort[t - 1] > radius:
                continue
            c = refine(z[cand[:t]].mean(), t, radius)
            if vanishes(c, t):
                members, centre = list(cand[:t]), c
                break
        groups.append((complex(centre), len(members)))
        taken = set(int(x) for x in members)
        unassigned = [u for u in unassigned if u not in taken]
    return groups


def roots(poly: PolyCoeffs, tol: Tolerances = DEFAULT_TOL) -> list:
    """Distinct roots of a monic polynomial as ``(location, multiplicity)`` pairs."""
    if not isinstance(poly, PolyCoeffs):
        poly = PolyCoeffs(poly)
    if poly.degree < 1:
        raise ContractError("roots() needs degree >= 1")
    raw = aberth(poly.coeffs)
    return group_roots(poly.coeffs, raw, tol)


# --------------------------------------------------------------------------
# critical points


def critical_polynomial(config: ZeroConfig) -> PolyCoeffs:
    """Monic ``g`` with ``p' = n * prod (z - z_i)^(mu_i - 1) * g``; its roots are the second-kind points."""
    z = config.array
    mu = config.mu
    m = config.m
    g = np.zeros(m, dtype=complex)
    for i in range(m):
        g += mu[i] * np.poly(np.delete(z, i)) if m > 1 else mu[i]
    g /= config.n
    g[0] = 1.0
    return PolyCoeffs(g)


def _polish_simple(config: ZeroConfig, loc: complex) -> complex:
    """Newton on ``sum mu_i / (x - z_i)``, whose zeros are the second-kind points.

    The product form keeps full relative accuracy near the zeros, where the
    expanded coefficients lose digits. A step is kept only if it lowers the
    residual.
    """
    z, mu = config.array, config.mu
    x = complex(loc)
    h = np.sum(mu / (x - z))
    for _ in range(3):
        dh = -np.sum(mu / (x - z) ** 2)
        if dh == 0:
            break
        y = x - h / dh
        hy = np.sum(mu / (y - z))
        if not abs(hy) < abs(h):
            break
        x, h = complex(y), hy
    return x


def _polish_multiple(coeffs: np.ndarray, loc: complex, nu: int) -> complex:
    """Newton on ``g^(nu - 1)``, which has a simple root at a root of ``g`` of multiplicity ``nu``."""
    d = np.polyder(coeffs, nu - 1)
    dd = np.polyder(d)
    x = complex(loc)
    val = np.polyval(d, x)
    for _ in range(3):
        der = np.polyval(dd, x)
        if der == 0:
            break
        y = x - val / der
        vy = np.polyval(d, y)
        if not abs(vy) < abs(val):
            break
        x, val = complex(y), vy
    return x


def _sort_key(item):
    loc, nu = item
    return (-nu, round(loc.real, 12), round(loc.imag, 12))


def critical_points(config: ZeroConfig, tol: Tolerances = DEFAULT_TOL) -> CriticalSet:
    """Distinct critical points of ``p``, classified by kind.

    Second-kind points are ordered by decreasing multiplicity, then by real
    and imaginary part. A root of ``g`` within ``tau_sep`` of a zero means the
    configuration sits on a stratum boundary (the zero's true multiplicity
    in ``p'`` is ambiguous) and raises :class:`DegeneracyError`.
    """
    if config.n < 2:
        raise ContractError("critical points need degree n >= 2")
    first = tuple((z, mu - 1) for z, mu in config.pairs() if mu >= 2)
    if config.m == 1:
        return CriticalSet(first, ())
    g = critical_polynomial(config)
    groups = group_roots(g.coeffs, aberth(g.coeffs), tol)
    groups = [(_polish_simple(config, loc) if nu == 1 else _polish_multiple(g.coeffs, loc, nu), nu)
              for loc, nu in groups]
    zeros = config.array
    for loc, _ in groups:
        d = np.abs(zeros - loc)
        i = int(np.argmin(d))
        if d[i] <= tol.tau_sep:
            raise DegeneracyError(
                f"critical point {loc} lies within {d[i]:.3e} of zero {i} ({zeros[i]})",
                pair=(i, loc),
            )
    second = tuple(sorted(groups, key=_sort_key))
    crit = CriticalSet(first, second)
    assert crit.total_multiplicity == config.n - 1
    return crit


def transform(config: ZeroConfig, rotation: float = 0.0, scale: float = 1.0, shift=0j) -> ZeroConfig:
    """Apply ``z -> scale * exp(i*rotation) * z + shift`` to every zero."""
    if not scale > 0:
        raise ContractError("scale must be positive")
    factor = scale * cmath.exp(1j * rotation)
    shift = _as_complex(shift)
    return config.with_locations(factor * z + shift for z in config.locations)
