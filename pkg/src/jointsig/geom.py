"""Planar primitives, polygons and the relabeling group H_k.

Points are accepted as any length-2 sequence and stored as float arrays.
A :class:`Polygon` is a cyclic vertex sequence; all reported indices are
1-based, internal indexing is 0-based.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, TypeVar

import numpy as np

from .errors import CollinearTriple, DuplicateConsecutiveVertices, TooFewVertices

Point2 = Tuple[float, float]
T = TypeVar("T")

# Collinearity: |area| <= AREA_RTOL * max(1, d(p,q) * d(q,r))
AREA_RTOL = 1e-9
# Coincidence: dist <= DIST_RTOL * max(1, coordinate magnitude)
DIST_RTOL = 1e-12


class GroupId(enum.Enum):
    SE2 = "se2"
    E2 = "e2"
    SA2 = "sa2"
    SKA2 = "ska2"
    SIM2 = "sim2"

    @property
    def window(self) -> int:
        """Number of consecutive vertices each signature point depends on."""
        return 3 if self in (GroupId.SE2, GroupId.SIM2) else 4

    @property
    def anchor_width(self) -> int:
        return self.window - 1

    @property
    def has_reflections(self) -> bool:
        return self in (GroupId.E2, GroupId.SKA2)

    @classmethod
    def parse(cls, value) -> "GroupId":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown group {value!r}; expected one of "
                + ", ".join(g.value for g in cls)
            ) from None


def as_points(vertices) -> np.ndarray:
    """Convert a vertex sequence to a finite ``(k, 2)`` float array."""
    arr = np.asarray(vertices, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected a sequence of 2D points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vertex coordinates must be finite")
    return arr


def wedge(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def signed_area3(zi, zj, zk) -> float:
    """Signed area ``1/2 (zj - zi) ^ (zj - zk)``; the middle point is the base."""
    ax, ay = zj[0] - zi[0], zj[1] - zi[1]
    bx, by = zj[0] - zk[0], zj[1] - zk[1]
    return 0.5 * (ax * by - ay * bx)


def dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def is_collinear(p, q, r, margin: float = 1.0) -> bool:
    tol = margin * AREA_RTOL * max(1.0, dist(p, q) * dist(q, r))
    return abs(signed_area3(p, q, r)) <= tol


def coincidence_tol(points: np.ndarray) -> float:
    scale = float(np.max(np.abs(points))) if points.size else 0.0
    return DIST_RTOL * max(1.0, scale)


def diameter(points) -> float:
    """Largest pairwise distance."""
    pts = np.asarray(points, dtype=float)
    best = 0.0
    for start in range(0, len(pts), 512):
        block = pts[start:start + 512]
        d = np.sqrt(((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
        best = max(best, float(d.max()))
    return best


@dataclass(frozen=True, eq=False)
class Polygon:
    """A cyclic, ordered vertex sequence of at least three points."""

    vertices: np.ndarray

    def __post_init__(self):
        arr = as_points(self.vertices).copy()
        if len(arr) < 3:
            raise TooFewVertices(f"a polygon needs at least 3 vertices, got {len(arr)}")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def k(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> np.ndarray:
        """Vertex with 1-based cyclic index ``i``."""
        return self.vertices[(i - 1) % self.k]

    def reversed(self) -> "Polygon":
        return Polygon(self.vertices[::-1])

    def __eq__(self, other):
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices)
        )

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"Polygon(k={self.k}, vertices={self.vertices.tolist()})"


def window_areas(points: np.ndarray, cyclic: bool = True) -> np.ndarray:
    """``signed_area3(p_i, p_{i+1}, p_{i+2})`` for every consecutive triple."""
    if cyclic:
        a, b, c = points, np.roll(points, -1, axis=0), np.roll(points, -2, axis=0)
    else:
        a, b, c = points[:-2], points[1:-1], points[2:]
    u = b - a
    w = b - c
    return 0.5 * (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])


def validate_polygon(vertices, group, margin: float = 1.0) -> Polygon:
    """Check the group's signature domain on every cyclic window.

    All groups need consecutive vertices to be distinct. E2, SA2 and SKA2
    additionally need four or more vertices and no three consecutive
    vertices collinear. ``margin`` scales the collinearity tolerance.
    """
    group = GroupId.parse(group)
    pts = as_points(vertices)
    k = len(pts)
    if k < 3 or k < group.window:
        raise TooFewVertices(
            f"{group.name} needs at least {max(3, group.window)} vertices, got {k}"
        )
    nxt = np.roll(pts, -1, axis=0)
    edges = np.hypot(*(nxt - pts).T)
    dup = np.flatnonzero(edges <= coincidence_tol(pts))
    if dup.size:
        i = int(dup[0]) + 1
        raise DuplicateConsecutiveVertices(
            f"vertices {i} and {i % k + 1} coincide", index=i
        )
    if group in (GroupId.E2, GroupId.SA2, GroupId.SKA2):
        areas = window_areas(pts)
        tol = margin * AREA_RTOL * np.maximum(1.0, edges * np.roll(edges, -1))
        bad = np.flatnonzero(np.abs(areas) <= tol)
        if bad.size:
            i = int(bad[0]) + 1
            raise CollinearTriple(
                f"vertices {i}, {i % k + 1}, {(i + 1) % k + 1} are collinear", index=i
            )
    return Polygon(pts)


@dataclass(frozen=True)
class HkElement:
    """Relabeling of a k-cycle: optional reversal, then a cyclic shift.

    Acting on a sequence ``s`` of length k gives ``s'[i] = s[sign*i + offset]``
    with ``sign = -1`` when reversed; composition is done in that affine
    index form and converted back.
    """

    shift: int = 0
    reversed: bool = False

    def _index_map(self, k: int) -> Tuple[int, int]:
        if self.reversed:
            return -1, (-1 - self.shift) % k
        return 1, self.shift % k

    @staticmethod
    def _from_index_map(sign: int, offset: int, k: int) -> "HkElement":
        if sign == 1:
            return HkElement(offset % k, False)
        return HkElement((-1 - offset) % k, True)

    def compose(self, other: "HkElement", k: int) -> "HkElement":
        """``self o other``: apply ``other`` first."""
        s1, b1 = self._index_map(k)
        s2, b2 = other._index_map(k)
        return HkElement._from_index_map(s1 * s2, s2 * b1 + b2, k)

    def inverse(self, k: int) -> "HkElement":
        sign, offset = self._index_map(k)
        return HkElement._from_index_map(sign, -sign * offset, k)

    def index_map(self, k: int) -> np.ndarray:
        """Source index (0-based) of each output position."""
        sign, offset = self._index_map(k)
        return (sign * np.arange(k) + offset) % k

    @staticmethod
    def all(k: int):
        for rev in (False, True):
            for c in range(k):
                yield HkElement(c, rev)


IDENTITY_H = HkElement(0, False)


def hk_apply(h: HkElement, seq: Sequence[T]):
    """Relabel ``seq``: reverse first if flagged, then shift left by ``h.shift``.

    Numpy arrays and polygons keep their type; other sequences become lists.
    """
    if isinstance(seq, Polygon):
        return Polygon(hk_apply(h, seq.vertices))
    k = len(seq)
    if not 0 <= h.shift < max(k, 1):
        raise ValueError(f"shift {h.shift} out of range for length {k}")
    if isinstance(seq, np.ndarray):
        t = seq[::-1] if h.reversed else seq
        return np.roll(t, -h.shift, axis=0)
    t = list(seq)[::-1] if h.reversed else list(seq)
    return t[h.shift:] + t[:h.shift]
