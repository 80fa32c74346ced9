"""Brute-force ground truth and test fixtures.

Nothing here looks at a signature: equivalence is decided by trying every
relabeling in H_k, recovering the group element from the anchor vertices
and measuring the residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, JointSigError, LengthMismatch
from .geom import GroupId, HkElement, Polygon, as_points, diameter, hk_apply, validate_polygon
from .groups import GroupElement, apply, recover, residual, rotation
from .matching import NO_MATCH, MatchResult

MAX_REJECTIONS = 10_000
SAMPLING_MARGIN = 10.0


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class FixtureSpec:
    fold: int
    motif: Sequence
    group_distortion: Optional[GroupElement] = None


def _vertices(P) -> np.ndarray:
    return P.vertices if isinstance(P, Polygon) else as_points(P)


def brute_force_equivalent(group, P, Q, tol: float = 1e-9) -> MatchResult:
    """Best verifying relabeling over all of H_k, or no match."""
    group = GroupId.parse(group)
    p, q = _vertices(P), _vertices(Q)
    if len(p) != len(q):
        raise LengthMismatch(f"vertex counts differ: {len(p)} vs {len(q)}")
    n1 = group.anchor_width
    res_tol = tol * max(diameter(p), diameter(q))
    best = NO_MATCH
    for h in HkElement.all(len(q)):
        qh = hk_apply(h, q)
        try:
            g = recover(group, p[:n1], qh[:n1], tol=tol)
        except JointSigError:
            continue
        r = residual(g, p, qh)
        if r <= res_tol and (not best.matched or r < best.residual):
            best = MatchResult(True, h, g, r)
    return best


def random_polygon(k: int, seed: int, group=GroupId.SE2) -> Polygon:
    """Uniform vertices in the unit box, resampled until valid for ``group``.

    Collinearity is rejected with a margin ten times the validation
    tolerance so that mild transforms keep the polygon valid.
    """
    group = GroupId.parse(group)
    if k < max(3, group.window):
        raise ValueError(f"{group.name} polygons need at least {max(3, group.window)} vertices")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REJECTIONS):
        pts = rng.uniform(0.0, 1.0, size=(k, 2))
        try:
            return validate_polygon(pts, group, margin=SAMPLING_MARGIN)
        except DomainError:
            continue
    raise SamplingError(f"no valid {k}-gon after {MAX_REJECTIONS} draws")


def _snapped_rotation(theta: float) -> np.ndarray:
    # quarter turns become exact so their copies are bitwise symmetric
    m = rotation(theta)
    return np.where(np.abs(m) < 1e-15, 0.0, m)


def make_symmetric_polygon(spec: FixtureSpec) -> Polygon:
    """Concatenate ``fold`` rotated copies of the motif, then distort.

    The result is checked against SE2 validity (distinct consecutive
    vertices); callers validate for stricter groups themselves.
    """
    motif = as_points(spec.motif)
    if spec.fold < 1 or len(motif) == 0:
        raise ValueError("fold must be >= 1 and the motif nonempty")
    parts = [motif @ _snapped_rotation(2.0 * math.pi * j / spec.fold).T for j in range(spec.fold)]
    pts = np.vstack(parts)
    if spec.group_distortion is not None:
        pts = apply(spec.group_distortion, pts)
    return validate_polygon(pts, GroupId.SE2)


def perturb(P, eps: float, seed: int, group=GroupId.SE2) -> Polygon:
    """Displace every coordinate by an independent uniform draw from [-eps, eps]."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    p = _vertices(P)
    rng = np.random.default_rng(seed)
    noisy = p + rng.uniform(-eps, eps, size=p.shape) if eps > 0 else p.copy()
    return validate_polygon(noisy, group)
