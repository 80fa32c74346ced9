"""The five planar transformation groups as affine maps ``z -> m z + v``.

Besides application and composition, this module recovers the group element
carrying a minimal anchor (two points for SE2/SIM2, three for E2/SA2/SKA2)
onto another. Recovery is an exact solve; callers decide acceptance by
measuring the residual over the full point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateAnchor, GroupMismatch, LengthMismatch, NoExactTransform
from .geom import GroupId, Polygon, as_points, dist, is_collinear

__all__ = [
    "GroupId",
    "GroupElement",
    "apply",
    "compose",
    "inverse",
    "identity",
    "validate_element",
    "random_element",
    "recover",
    "residual",
    "rotation",
]

ELEMENT_TOL = 1e-9
DET_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class GroupElement:
    m: np.ndarray
    v: np.ndarray
    group: GroupId

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(2, 2)
        v = np.array(self.v, dtype=float).reshape(2)
        m.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "group", GroupId.parse(self.group))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.m))

    @property
    def scale(self) -> float:
        """Uniform scale factor (1 for the area-preserving groups)."""
        return math.sqrt(abs(self.det))

    def allclose(self, other: "GroupElement", atol: float = 1e-9) -> bool:
        return (
            self.group == other.group
            and np.allclose(self.m, other.m, rtol=0, atol=atol)
            and np.allclose(self.v, other.v, rtol=0, atol=atol)
        )

    def __call__(self, x):
        return apply(self, x)

    def __repr__(self):
        return (
            f"GroupElement({self.group.name}, m={self.m.tolist()}, v={self.v.tolist()})"
        )


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def identity(group) -> GroupElement:
    return GroupElement(np.eye(2), np.zeros(2), GroupId.parse(group))


def apply(g: GroupElement, x):
    """Apply ``g`` to a point, an ``(n, 2)`` array or a polygon."""
    if isinstance(x, Polygon):
        return Polygon(apply(g, x.vertices))
    arr = np.asarray(x, dtype=float)
    return arr @ g.m.T + g.v


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    """``g1 o g2`` (apply ``g2`` first)."""
    if g1.group != g2.group:
        raise GroupMismatch(f"cannot compose {g1.group.name} with {g2.group.name}")
    return GroupElement(g1.m @ g2.m, g1.m @ g2.v + g1.v, g1.group)


def inverse(g: GroupElement) -> GroupElement:
    minv = np.linalg.inv(g.m)
    return GroupElement(minv, -minv @ g.v, g.group)


def validate_element(g: GroupElement, tol: float = ELEMENT_TOL) -> bool:
    m = g.m
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(g.v))):
        return False
    det = float(np.linalg.det(m))
    group = g.group
    if group in (GroupId.SE2, GroupId.E2):
        if not np.allclose(m.T @ m, np.eye(2), rtol=0, atol=tol):
            return False
        if group is GroupId.SE2:
            return abs(det - 1.0) <= tol
        return abs(abs(det) - 1.0) <= tol
    if group is GroupId.SA2:
        return abs(det - 1.0) <= tol
    if group is GroupId.SKA2:
        return abs(abs(det) - 1.0) <= tol
    # SIM2: m = lam * R, lam > 0
    if det <= 0:
        return False
    lam = math.sqrt(det)
    return (
        abs(m[0, 0] - m[1, 1]) <= tol * lam
        and abs(m[0, 1] + m[1, 0]) <= tol * lam
    )


def random_element(
    group, seed: int, translation_range: float = 10.0, scale_range: float = 4.0
) -> GroupElement:
    """Deterministic pseudo-random element of ``group``.

    SA2/SKA2 matrices are ``shear @ diag(a, 1/a) @ rotation`` with ``a``
    log-uniform in ``[1/scale_range, scale_range]``; SIM2 uses the same
    log-uniform law for its scale. E2 and SKA2 flip a fair coin for a
    reflection.
    """
    if translation_range <= 0 or scale_range <= 0:
        raise ValueError("ranges must be positive")
    group = GroupId.parse(group)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    reflect = bool(rng.integers(2)) if group.has_reflections else False
    log_s = math.log(max(scale_range, 1.0 / scale_range))
    a = math.exp(rng.uniform(-log_s, log_s))
    shear = rng.uniform(-1.0, 1.0)
    v = rng.uniform(-translation_range, translation_range, size=2)

    m = rotation(theta)
    if group in (GroupId.SA2, GroupId.SKA2):
        m = np.array([[1.0, shear], [0.0, 1.0]]) @ np.diag([a, 1.0 / a]) @ m
        m = m / math.sqrt(abs(np.linalg.det(m)))
    elif group is GroupId.SIM2:
        m = a * m
    if reflect:
        m = m @ np.diag([1.0, -1.0])
    return GroupElement(m, v, group)


def _direction_map(d_src, d_dst) -> np.ndarray:
    """Rotation turning direction ``d_src`` into direction ``d_dst``."""
    theta = math.atan2(d_dst[1], d_dst[0]) - math.atan2(d_src[1], d_src[0])
    return rotation(theta)


def _check_count(group: GroupId, src, dst):
    if len(src) != len(dst):
        raise LengthMismatch("source and destination differ in length")
    if len(src) != group.anchor_width:
        raise ValueError(
            f"{group.name} recovery needs {group.anchor_width} correspondences, "
            f"got {len(src)}"
        )


def recover(group, src: Sequence, dst: Sequence, tol: float = ELEMENT_TOL) -> GroupElement:
    """Unique element of ``group`` mapping the anchor ``src`` onto ``dst``.

    ``tol`` is relative to the anchor scale and bounds how far ``dst`` may
    sit from an exact image; within it the returned element is projected
    onto the group (orthonormal rotation, unit determinant) so it is always
    a valid element.
    """
    group = GroupId.parse(group)
    src = as_points(src)
    dst = as_points(dst)
    _check_count(group, src, dst)
    p1, p2 = src[0], src[1]
    q1, q2 = dst[0], dst[1]
    dp, dq = p2 - p1, q2 - q1
    lp, lq = dist(p1, p2), dist(q1, q2)
    scale = max(lp, lq, float(np.abs(src).max()), float(np.abs(dst).max()), 1e-300)
    if lp <= 1e-12 * scale:
        raise DegenerateAnchor("anchor points coincide")

    if group in (GroupId.SE2, GroupId.SIM2):
        if group is GroupId.SE2:
            if abs(lp - lq) > tol * max(lp, lq):
                raise NoExactTransform(
                    f"anchor lengths differ: {lp!r} vs {lq!r}"
                )
            m = _direction_map(dp, dq)
        else:
            if lq <= 1e-12 * scale:
                raise NoExactTransform("destination anchor points coincide")
            m = (lq / lp) * _direction_map(dp, dq)
        return GroupElement(m, q1 - m @ p1, group)

    p3, q3 = src[2], dst[2]
    if is_collinear(p1, p2, p3):
        raise DegenerateAnchor("anchor points are collinear")
    span = max(lp, dist(p2, p3), dist(p1, p3))

    if group is GroupId.E2:
        if abs(lp - lq) > tol * max(lp, lq):
            raise NoExactTransform(f"anchor lengths differ: {lp!r} vs {lq!r}")
        flip = np.diag([1.0, -1.0])
        best = None
        for m in (_direction_map(dp, dq), _direction_map(flip @ dp, dq) @ flip):
            err = dist(m @ (p3 - p1) + q1, q3)
            if best is None or err < best[0]:
                best = (err, m)
        err, m = best
        if err > tol * span:
            raise NoExactTransform(f"third anchor point misses by {err!r}")
        return GroupElement(m, q1 - m @ p1, group)

    # SA2 / SKA2: solve m [p2-p1, p3-p1] = [q2-q1, q3-q1]
    a = np.column_stack([dp, p3 - p1])
    b = np.column_stack([dq, q3 - q1])
    m = b @ np.linalg.inv(a)
    det = float(np.linalg.det(m))
    target = 1.0 if group is GroupId.SA2 else math.copysign(1.0, det)
    limit = max(DET_TOL, tol)
    if not math.isfinite(det) or abs(det - target) > limit:
        raise NoExactTransform(f"recovered determinant {det!r} violates {group.name}")
    m = m / math.sqrt(abs(det))
    v = dst.mean(axis=0) - m @ src.mean(axis=0)
    return GroupElement(m, v, group)


def residual(g: GroupElement, P, Q) -> float:
    """Largest distance between ``g`` applied to each vertex of P and Q's vertex."""
    p = P.vertices if isinstance(P, Polygon) else as_points(P)
    q = Q.vertices if isinstance(Q, Polygon) else as_points(Q)
    if p.shape != q.shape:
        raise LengthMismatch(f"vertex counts differ: {len(p)} vs {len(q)}")
    d = apply(g, p) - q
    return float(np.sqrt((d * d).sum(axis=1)).max())
