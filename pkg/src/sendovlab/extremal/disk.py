"""Smallest enclosing disk by randomized incremental construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError

CONTAIN_RTOL = 1e-12


@dataclass(frozen=True)
class EnclosingDisk:
    center: complex
    radius: float
    support: tuple = ()

    def contains(self, z, slack: float = CONTAIN_RTOL) -> bool:
        return abs(complex(z) - self.center) <= self.radius + slack * max(1.0, self.radius)


def _two_point(a: complex, b: complex) -> EnclosingDisk:
    c = (a + b) / 2
    return EnclosingDisk(c, abs(a - c), (a, b))


def _three_point(a: complex, b: complex, c: complex) -> EnclosingDisk | None:
    """Circumcircle of a triangle, or ``None`` for (near-)collinear points."""
    b_, c_ = b - a, c - a
    d = 2 * (b_.real * c_.imag - b_.imag * c_.real)
    scale = max(abs(b_), abs(c_)) ** 2
    if abs(d) <= 1e-14 * scale:
        return None
    bb, cc = abs(b_) ** 2, abs(c_) ** 2
    ux = (c_.imag * bb - b_.imag * cc) / d
    uy = (b_.real * cc - c_.real * bb) / d
    center = a + complex(ux, uy)
    radius = max(abs(a - center), abs(b - center), abs(c - center))
    return EnclosingDisk(center, radius, (a, b, c))


def _with_two(points, a, b) -> EnclosingDisk:
    disk = _two_point(a, b)
    for c in points:
        if disk.contains(c):
            continue
        cand = _three_point(a, b, c)
        if cand is None:
            # collinear: the farthest pair among the three spans the disk
            trio = [a, b, c]
            pairs = [(trio[i], trio[j]) for i in range(3) for j in range(i + 1, 3)]
            cand = max((_two_point(*p) for p in pairs), key=lambda dd: dd.radius)
        disk = cand
    return disk


def _with_one(points, a) -> EnclosingDisk:
    disk = EnclosingDisk(a, 0.0, (a,))
    for idx, b in enumerate(points):
        if not disk.contains(b):
            disk = _with_two(points[:idx], a, b)
    return disk


def enclosing_disk(points, seed: int = 0) -> EnclosingDisk:
    """Smallest closed disk containing ``points``.

    Welzl's algorithm in its iterative form on a seeded random permutation;
    expected linear time. ``support`` holds the two or three points on the
    boundary that determine the disk.
    """
    pts = [complex(z) for z in points]
    if not pts:
        raise ContractError("enclosing disk of an empty set")
    for z in pts:
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            raise ContractError("non-finite point")
    order = np.random.default_rng(seed).permutation(len(pts))
    pts = [pts[i] for i in order]
    disk = EnclosingDisk(pts[0], 0.0, (pts[0],))
    for idx in range(1, len(pts)):
        if not disk.contains(pts[idx]):
            disk = _with_one(pts[:idx], pts[idx])
    return disk


def circumradius(points) -> float:
    return enclosing_disk(points).radius
