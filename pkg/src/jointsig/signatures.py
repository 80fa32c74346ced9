"""Windowed joint-invariant signatures for the five groups.

Each family maps a window of consecutive vertices (3 for SE2/SIM2, 4 for
E2/SA2/SKA2) to a pair ``(c1, c2)``:

====  ==========================================  ==========================
SE2   ``|p3 - p2|``                               ``1/2 det[p3-p1, p2-p1]``
E2    ``|p4 - p3|``                               ``sgn(D123 D234) |p4-p2|``
SA2   ``a234``                                    ``a124``
SKA2  ``sgn(a123 a234) |a234|``                   ``sgn(a123 a124) |a124|``
SIM2  ``a123 / |p2-p1|^2``                        ``(p2-p1).(p3-p1) / |p2-p1|^2``
====  ==========================================  ==========================

with ``a_ijk = signed_area3(p_i, p_j, p_k)``; note ``D123 == a123``.
All window functions are vectorized: every argument may be a single point
or an ``(w, 2)`` stack of points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CollinearTriple, DuplicateConsecutiveVertices, TooFewVertices
from .geom import (
    AREA_RTOL,
    DIST_RTOL,
    GroupId,
    HkElement,
    Polygon,
    as_points,
    hk_apply,
)

FORWARD = "forward"
REVERSED = "reversed"


class SignaturePoint(NamedTuple):
    c1: float
    c2: float


def _area(a, b, c):
    # signed_area3, broadcast over stacks of points
    ux, uy = b[..., 0] - a[..., 0], b[..., 1] - a[..., 1]
    wx, wy = b[..., 0] - c[..., 0], b[..., 1] - c[..., 1]
    return 0.5 * (ux * wy - uy * wx)


def _norm(a, b):
    return np.hypot(b[..., 0] - a[..., 0], b[..., 1] - a[..., 1])


def _collinear_mask(a, b, c, area):
    tol = AREA_RTOL * np.maximum(1.0, _norm(a, b) * _norm(b, c))
    return np.abs(area) <= tol


def _first(mask) -> int:
    return int(np.flatnonzero(np.atleast_1d(mask))[0])


def _raise_collinear(mask, offset: int = 0):
    i = _first(mask)
    raise CollinearTriple(
        f"window {i + 1}: consecutive triple starting at window vertex "
        f"{offset + 1} is collinear",
        index=i + 1,
    )


def _pair(c1, c2):
    return np.stack([np.asarray(c1, dtype=float), np.asarray(c2, dtype=float)], axis=-1)


def _sejis(p1, p2, p3):
    return _pair(_norm(p2, p3), _area(p1, p2, p3))


def _ejis(p1, p2, p3, p4):
    d123 = _area(p1, p2, p3)
    d234 = _area(p2, p3, p4)
    bad1 = _collinear_mask(p1, p2, p3, d123)
    if np.any(bad1):
        _raise_collinear(bad1, 0)
    bad2 = _collinear_mask(p2, p3, p4, d234)
    if np.any(bad2):
        _raise_collinear(bad2, 1)
    return _pair(_norm(p3, p4), np.sign(d123 * d234) * _norm(p2, p4))


def _sajis(p1, p2, p3, p4):
    return _pair(_area(p2, p3, p4), _area(p1, p2, p4))


def _skajis(p1, p2, p3, p4):
    a123 = _area(p1, p2, p3)
    bad = _collinear_mask(p1, p2, p3, a123)
    if np.any(bad):
        _raise_collinear(bad, 0)
    a234 = _area(p2, p3, p4)
    a124 = _area(p1, p2, p4)
    return _pair(np.sign(a123 * a234) * np.abs(a234), np.sign(a123 * a124) * np.abs(a124))


def _simjis(p1, p2, p3):
    d = p2 - p1
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2
    scale = np.maximum(1.0, np.maximum(np.abs(p1).max(axis=-1), np.abs(p2).max(axis=-1)))
    bad = np.sqrt(r2) <= DIST_RTOL * scale
    if np.any(bad):
        i = _first(bad)
        raise DuplicateConsecutiveVertices(
            f"window {i + 1}: first two vertices coincide", index=i + 1
        )
    e = p3 - p1
    dot = d[..., 0] * e[..., 0] + d[..., 1] * e[..., 1]
    return _pair(_area(p1, p2, p3) / r2, dot / r2)


_FAMILIES = {
    GroupId.SE2: _sejis,
    GroupId.E2: _ejis,
    GroupId.SA2: _sajis,
    GroupId.SKA2: _skajis,
    GroupId.SIM2: _simjis,
}


def _point(out) -> SignaturePoint:
    return SignaturePoint(float(out[0]), float(out[1]))


def _pts(*ps):
    return [np.asarray(p, dtype=float) for p in ps]


def sejis_window(p1, p2, p3) -> SignaturePoint:
    return _point(_sejis(*_pts(p1, p2, p3)))


def ejis_window(p1, p2, p3, p4) -> SignaturePoint:
    return _point(_ejis(*_pts(p1, p2, p3, p4)))


def sajis_window(p1, p2, p3, p4) -> SignaturePoint:
    return _point(_sajis(*_pts(p1, p2, p3, p4)))


def skajis_window(p1, p2, p3, p4) -> SignaturePoint:
    return _point(_skajis(*_pts(p1, p2, p3, p4)))


def simjis_window(p1, p2, p3) -> SignaturePoint:
    return _point(_simjis(*_pts(p1, p2, p3)))


def window_invariant(group, points) -> SignaturePoint:
    """Window invariant of exactly ``group.window`` points."""
    group = GroupId.parse(group)
    pts = as_points(points)
    if len(pts) != group.window:
        raise ValueError(f"{group.name} windows have {group.window} points, got {len(pts)}")
    return _point(_FAMILIES[group](*pts))


def window_invariants(group, points, cyclic: bool = True) -> np.ndarray:
    """``(w, 2)`` array of window invariants, row r for the window starting at r."""
    group = GroupId.parse(group)
    pts = as_points(points)
    n = group.window
    if cyclic:
        cols = [np.roll(pts, -j, axis=0) for j in range(n)]
    else:
        w = len(pts) - n + 1
        cols = [pts[j:j + w] for j in range(n)]
    return _FAMILIES[group](*cols)


def anchor_invariants(group, points) -> np.ndarray:
    """Complete fundamental invariants of the first ``n - 1`` points.

    Accepts ``(n-1, 2)`` for one anchor or ``(n-1, w, 2)`` for a stack.
    SIM2 acts transitively on pairs of distinct points, so its anchor is empty.
    """
    group = GroupId.parse(group)
    pts = np.asarray(points, dtype=float)
    p1, p2 = pts[0], pts[1]
    if group is GroupId.SE2:
        vals = [_norm(p1, p2)]
    elif group is GroupId.SIM2:
        vals = []
    elif group is GroupId.E2:
        p3 = pts[2]
        vals = [_norm(p1, p2), _norm(p2, p3), _norm(p1, p3)]
    elif group is GroupId.SA2:
        vals = [_area(p1, p2, pts[2])]
    else:
        vals = [np.abs(_area(p1, p2, pts[2]))]
    if not vals:
        return np.zeros(pts.shape[1:-1] + (0,))
    return np.stack([np.asarray(v, dtype=float) for v in vals], axis=-1)


@dataclass(frozen=True, eq=False)
class Signature:
    """Cyclic sequence of signature points; row r comes from the window at vertex r."""

    points: np.ndarray
    group: GroupId
    direction: str = FORWARD

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "group", GroupId.parse(self.group))
        if self.direction not in (FORWARD, REVERSED):
            raise ValueError(f"direction must be {FORWARD!r} or {REVERSED!r}")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i) -> SignaturePoint:
        return SignaturePoint(*map(float, self.points[i]))

    def shifted(self, c: int) -> "Signature":
        """The signature relabeled by a cyclic shift of ``c``."""
        return Signature(hk_apply(HkElement(c, False), self.points), self.group, self.direction)

    def allclose(self, other: "Signature", atol: float) -> bool:
        return self.points.shape == other.points.shape and bool(
            np.all(np.abs(self.points - other.points) <= atol)
        )


@dataclass(frozen=True, eq=False)
class OpenSignature:
    anchor: tuple
    points: np.ndarray

    def __len__(self):
        return len(self.points)


def _vertices(P) -> np.ndarray:
    return P.vertices if isinstance(P, Polygon) else as_points(P)


def signature(group, P, direction: str = FORWARD) -> Signature:
    """Cyclic signature of ``P``; ``direction='reversed'`` uses the reversed vertex order."""
    group = GroupId.parse(group)
    pts = _vertices(P)
    if len(pts) < max(3, group.window):
        raise TooFewVertices(
            f"{group.name} signatures need at least {max(3, group.window)} vertices"
        )
    if direction == REVERSED:
        pts = pts[::-1]
    elif direction != FORWARD:
        raise ValueError(f"direction must be {FORWARD!r} or {REVERSED!r}")
    return Signature(window_invariants(group, pts, cyclic=True), group, direction)


def open_signature(group, chain) -> OpenSignature:
    """Signature of an open chain: anchor invariants plus every in-order window."""
    group = GroupId.parse(group)
    pts = as_points(chain)
    if len(pts) < group.window:
        raise TooFewVertices(
            f"{group.name} open signatures need at least {group.window} points, got {len(pts)}"
        )
    anchor = tuple(float(x) for x in anchor_invariants(group, pts[: group.anchor_width]))
    return OpenSignature(anchor, window_invariants(group, pts, cyclic=False))


def noise_tolerance_se2(eps: float) -> float:
    """Bound on ``|a~ - a|`` for the SE2 edge-length component.

    Every coordinate moving by at most ``eps`` moves each point by at most
    ``sqrt(2) eps``, so an edge length changes by at most ``2 sqrt(2) eps``.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return 2.0 * math.sqrt(2.0) * eps


def noise_tolerance_se2_area(eps: float, p1, p2, p3) -> float:
    """First-order bound on the SE2 area component of the window (p1, p2, p3).

    ``eps * (d12 + d13 + d23) + 2 eps^2``, from multilinearity of the
    determinant. Not a closed-form guarantee from the literature; checked
    empirically in the test-suite.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    p1, p2, p3 = _pts(p1, p2, p3)
    perim = float(_norm(p1, p2) + _norm(p1, p3) + _norm(p2, p3))
    return eps * perim + 2.0 * eps * eps
