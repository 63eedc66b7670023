"""Stratum bookkeeping and the interpolation identities behind the Jacobian rank property.

A stratum is fixed by the zero multiplicities ``mu`` (summing to ``n``) and the
second-kind critical multiplicities ``nu`` (summing to ``m - 1``). The CLI
notation is ``n:mu_1,...,mu_m/nu_1,...,nu_k``, e.g. ``5:1,1,1,1,1/4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .cpoly import (
    DEFAULT_TOL,
    PolyCoeffs,
    Tolerances,
    ZeroConfig,
    closest_pair,
    critical_points,
    horner_taylor,
)
from .errors import ContractError, ParseError


@dataclass(frozen=True)
class Structure:
    mu: tuple
    nu: tuple

    def __post_init__(self):
        mu = tuple(int(x) for x in self.mu)
        nu = tuple(int(x) for x in self.nu)
        if not mu or min(mu) < 1:
            raise ContractError(f"zero multiplicities must be positive, got {mu}")
        if nu and min(nu) < 1:
            raise ContractError(f"critical multiplicities must be positive, got {nu}")
        if sum(nu) != len(mu) - 1:
            raise ContractError(f"sum(nu) = {sum(nu)} but m - 1 = {len(mu) - 1}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @property
    def n(self) -> int:
        return sum(self.mu)

    @property
    def m(self) -> int:
        return len(self.mu)

    @property
    def k(self) -> int:
        return len(self.nu)

    @property
    def s(self) -> int:
        return self.m - 1 - self.k

    @property
    def notation(self) -> str:
        return f"{self.n}:{','.join(map(str, self.mu))}/{','.join(map(str, self.nu))}"

    def __str__(self):
        return self.notation


def parse_stratum(text: str) -> Structure:
    """Parse ``n:mu_1,...,mu_m/nu_1,...,nu_k``."""
    text = text.strip()
    try:
        head, rest = text.split(":", 1)
        mu_txt, nu_txt = rest.split("/", 1)
        n = int(head)
        mu = tuple(int(x) for x in mu_txt.split(",") if x.strip())
        nu = tuple(int(x) for x in nu_txt.split(",") if x.strip())
    except ValueError as exc:
        raise ParseError(f"bad stratum notation {text!r} (expected n:mu,.../nu,...)", 1, 1) from exc
    if sum(mu) != n:
        raise ParseError(f"stratum {text!r}: sum(mu) = {sum(mu)} != n = {n}", 1, 1)
    try:
        return Structure(mu, nu)
    except ContractError as exc:
        raise ParseError(f"stratum {text!r}: {exc}", 1, 1) from exc


def classify_stratum(config: ZeroConfig, tol: Tolerances = DEFAULT_TOL) -> Structure:
    crit = critical_points(config, tol)
    return Structure(config.multiplicities, crit.nu)


def partitions(total: int, largest: int | None = None) -> Iterator[tuple]:
    """Integer partitions of ``total`` in non-increasing order."""
    if largest is None:
        largest = total
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for tail in partitions(total - first, first):
            yield (first,) + tail


# --------------------------------------------------------------------------
# divided differences


def _as_coeffs(q) -> np.ndarray:
    if isinstance(q, PolyCoeffs):
        return q.coeffs
    return np.asarray(q, dtype=complex)


def divided_difference(q, nodes: Sequence[complex]) -> complex:
    """Divided difference ``q[x_0, ..., x_r]`` over a node multiset.

    Repeated nodes (exact equality) are handled in confluent (Hermite) form:
    a run of ``j + 1`` equal nodes contributes ``q^(j)(x) / j!``. ``q`` is
    a dense coefficient array (highest degree first) or :class:`PolyCoeffs`.
    """
    a = _as_coeffs(q)
    nodes = [complex(x) for x in nodes]
    if not nodes:
        raise ContractError("divided difference needs at least one node")
    # group equal nodes so that confluent runs are contiguous
    order = []
    for x in nodes:
        if x not in order:
            order.append(x)
    counts = {x: nodes.count(x) for x in order}
    xs = [x for x in order for _ in range(counts[x])]
    taylor = {x: horner_taylor(a, x, counts[x] - 1) for x in order}
    r = len(xs)
    col = [taylor[x][0] for x in xs]
    for width in range(1, r):
        nxt = []
        for i in range(r - width):
            lo, hi = xs[i], xs[i + width]
            if lo == hi:
                nxt.append(taylor[lo][width])
            else:
                nxt.append((col[i + 1] - col[i]) / (hi - lo))
        col = nxt
    return complex(col[0])


def _check_nodes(nodes, tau_sep: float) -> np.ndarray:
    z = np.asarray([complex(x) for x in nodes], dtype=complex)
    pair = closest_pair(z)
    if pair is not None and pair[2] <= tau_sep:
        raise ContractError(f"nodes {pair[0]} and {pair[1]} are not distinct")
    return z


def _check_monic(q, degree: int) -> np.ndarray:
    a = _as_coeffs(q)
    if a.size - 1 != degree or a[0] != 1:
        raise ContractError(f"q must be monic of degree {degree}")
    return a


def leading_dd_identity(q, nodes, doubled_index: int, tau_sep: float = DEFAULT_TOL.tau_sep) -> float:
    """``|q[z_1, ..., z_i, z_i, ..., z_s] - 1|`` for monic ``q`` of degree ``s``."""
    z = _check_nodes(nodes, tau_sep)
    a = _check_monic(q, z.size)
    if not 0 <= doubled_index < z.size:
        raise ContractError("doubled_index out of range")
    multiset = list(z[: doubled_index + 1]) + list(z[doubled_index:])
    return abs(divided_difference(a, multiset) - 1.0)


def lagrange_residual(q, nodes, z, tau_sep: float = DEFAULT_TOL.tau_sep) -> float:
    """Residual of ``q(z) = sum_i q(z_i) w_i(z) / w_i(z_i) + w(z)``.

    Here ``w`` is the node polynomial and ``w_i = w / (z - z_i)``; ``q`` is
    monic of degree equal to the number of nodes.
    """
    x = _check_nodes(nodes, tau_sep)
    a = _check_monic(q, x.size)
    z = complex(z)
    s = x.size
    total = np.prod(z - x)
    for i in range(s):
        others = np.delete(x, i)
        total += np.polyval(a, x[i]) * np.prod(z - others) / np.prod(x[i] - others)
    return float(abs(np.polyval(a, z) - total))
