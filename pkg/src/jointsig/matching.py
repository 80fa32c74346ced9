"""Equivalence, symmetry and partial-equivalence decisions from signatures.

Signature comparison only nominates candidate relabelings. Every candidate
is then confirmed by recovering the group element from the anchor vertices
and measuring the residual over all vertices, so a reported match is
always backed by an explicit transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateAnchor,
    EmptySolution,
    GroupMismatch,
    JointSigError,
    LengthMismatch,
)
from .geom import (
    GroupId,
    HkElement,
    Polygon,
    as_points,
    diameter,
    dist,
    hk_apply,
    is_collinear,
    validate_polygon,
)
from .groups import GroupElement, apply, recover, residual
from .signatures import (
    FORWARD,
    REVERSED,
    Signature,
    SignaturePoint,
    anchor_invariants,
    signature,
    window_invariant,
    window_invariants,
)

VERTEX_AXIS = "vertex"
EDGE_AXIS = "edge-midpoint"


@dataclass(frozen=True)
class MatchResult:
    """Outcome of an equivalence test.

    When matched, ``apply(g, P)`` equals ``hk_apply(h, Q)`` up to ``residual``.
    """

    matched: bool
    h: Optional[HkElement] = None
    g: Optional[GroupElement] = None
    residual: Optional[float] = None

    def __bool__(self):
        return self.matched


NO_MATCH = MatchResult(False)


@dataclass(frozen=True)
class Line:
    point: np.ndarray
    direction: np.ndarray


@dataclass(frozen=True)
class ReflectionMatch:
    shift: int
    axis_type: str
    g: GroupElement
    axis: Optional[Line] = None
    residual: float = 0.0


@dataclass(frozen=True)
class SymmetryReport:
    folds: int
    rotation_shifts: List[int]
    reflection_matches: List[ReflectionMatch] = field(default_factory=list)
    # shifts realized by orientation-reversing elements (non-simple polygons only)
    reversing_shifts: List[int] = field(default_factory=list)


@dataclass(frozen=True)
class PartialMatch:
    """A run of ``length`` consecutive vertices of P mapped by ``g`` onto Q.

    Starts are 1-based. With ``reversed`` set, Q is walked backwards from
    ``start_q``.
    """

    start_p: int
    start_q: int
    length: int
    reversed: bool
    g: GroupElement
    residual: float


# -- cyclic matching ---------------------------------------------------------


def _kmp_table(pattern: Sequence) -> List[int]:
    fail = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k and pattern[i] != pattern[k]:
            k = fail[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i] = k
    return fail


def _kmp_find_all(pattern: Sequence, text: Sequence) -> List[int]:
    fail = _kmp_table(pattern)
    hits, k = [], 0
    for i, x in enumerate(text):
        while k and x != pattern[k]:
            k = fail[k - 1]
        if x == pattern[k]:
            k += 1
        if k == len(pattern):
            hits.append(i - k + 1)
            k = fail[k - 1]
    return hits


def _rows(sig) -> np.ndarray:
    return sig.points if isinstance(sig, Signature) else np.asarray(sig, dtype=float)


def cyclic_match(a, b, tol: float = 0.0, method: str = "auto") -> set:
    """All shifts ``c`` with ``a == hk_apply((c, False), b)`` componentwise within ``tol``.

    ``method``: ``"exact"`` runs a linear-time search of ``a`` in ``b + b``
    on exact values, ``"quantized"`` does the same after rounding to
    multiples of ``tol`` (exact only for inputs on that grid), ``"direct"``
    compares every shift. ``"auto"`` picks exact for ``tol == 0``, else direct.
    """
    if isinstance(a, Signature) and isinstance(b, Signature) and a.group != b.group:
        raise GroupMismatch("signatures belong to different groups")
    ra, rb = _rows(a), _rows(b)
    if ra.shape != rb.shape:
        raise LengthMismatch(f"signature lengths differ: {len(ra)} vs {len(rb)}")
    k = len(ra)
    if method == "auto":
        method = "exact" if tol == 0 else "direct"
    if method in ("exact", "quantized"):
        if method == "quantized":
            if tol <= 0:
                raise ValueError("quantized matching needs a positive quantum")
            ra = np.round(ra / tol).astype(np.int64)
            rb = np.round(rb / tol).astype(np.int64)
        pa = [tuple(r) for r in ra.tolist()]
        pb = [tuple(r) for r in rb.tolist()]
        return {c for c in _kmp_find_all(pa, pb + pb[:-1]) if c < k}
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    hits = set()
    for c in range(k):
        if np.all(np.abs(ra - np.roll(rb, -c, axis=0)) <= tol):
            hits.add(c)
    return hits


def signature_tolerance(tol: float, *arrays) -> float:
    """Absolute comparison tolerance for signature values, scaled by magnitude."""
    mags = [float(np.max(np.abs(x))) for x in arrays if np.size(x)]
    return tol * max([1.0] + mags)


def _geometric_tolerance(tol: float, *point_sets) -> float:
    return tol * max(diameter(p) for p in point_sets)


def _vertices(P) -> np.ndarray:
    return P.vertices if isinstance(P, Polygon) else as_points(P)


def _verify(group, P, Qh, tol, res_tol) -> Optional[MatchResult]:
    n1 = group.anchor_width
    try:
        g = recover(group, P[:n1], Qh[:n1], tol=tol)
    except JointSigError:
        return None
    r = residual(g, P, Qh)
    if r <= res_tol:
        return MatchResult(True, None, g, r)
    return None


# -- global equivalence ------------------------------------------------------


def _verified_relabelings(group, P, Q, tol):
    group = GroupId.parse(group)
    P = validate_polygon(_vertices(P), group)
    Q = validate_polygon(_vertices(Q), group)
    if P.k != Q.k:
        return
    p, q = P.vertices, Q.vertices
    sig_p = signature(group, P)
    res_tol = _geometric_tolerance(tol, p, q)
    for rev in (False, True):
        sig_q = signature(group, Q, REVERSED if rev else FORWARD)
        stol = signature_tolerance(tol, sig_p.points, sig_q.points)
        for c in sorted(cyclic_match(sig_p, sig_q, stol)):
            h = HkElement(c, rev)
            hit = _verify(group, p, hk_apply(h, q), tol, res_tol)
            if hit is not None:
                yield MatchResult(True, h, hit.g, hit.residual)


def equivalence_test(group, P, Q, tol: float = 1e-9) -> MatchResult:
    """Decide whether ``P`` and ``Q`` are equivalent under ``group``.

    ``tol`` is relative: signature values are compared within ``tol`` times
    their magnitude and the residual must not exceed ``tol`` times the
    larger polygon diameter. The first verified relabeling is returned
    (smallest shift, forward before reversed).
    """
    return next(_verified_relabelings(group, P, Q, tol), NO_MATCH)


def equivalence_candidates(group, P, Q, tol: float = 1e-9) -> List[MatchResult]:
    """Every verified relabeling, in the same order ``equivalence_test`` tries them."""
    return list(_verified_relabelings(group, P, Q, tol))


# -- symmetry ----------------------------------------------------------------


def _divisors(k: int) -> List[int]:
    return [d for d in range(1, k + 1) if k % d == 0]


def rotational_folds(sig: Signature, tol: float = 0.0) -> int:
    """Number of times the signature curve winds on itself.

    ``k / d`` for the smallest positive shift ``d`` (a divisor of k) under
    which the cyclic point sequence is unchanged within ``tol``.
    """
    rows = _rows(sig)
    k = len(rows)
    shifts = cyclic_match(rows, rows, tol)
    for d in _divisors(k):
        if d % k in shifts:
            return k // d
    return 1


def _axis_type(c: int, k: int) -> str:
    # (c, reversed) sends position i to source index (-1 - c - i) mod k; it
    # fixes a vertex iff that offset is even or k is odd.
    offset = (-1 - c) % k
    return VERTEX_AXIS if (k % 2 == 1 or offset % 2 == 0) else EDGE_AXIS


def fixed_line(g: GroupElement, centroid=None) -> Line:
    """Fixed line of an orientation-reversing isometry.

    Direction is the +1 eigenvector of ``g.m`` taken in the upper half-plane;
    the point is the foot of the perpendicular from ``centroid`` (or the
    origin).
    """
    w, vecs = np.linalg.eig(g.m)
    d = np.real(vecs[:, int(np.argmin(np.abs(w - 1.0)))])
    d = d / np.linalg.norm(d)
    if d[1] < 0 or (d[1] == 0 and d[0] < 0):
        d = -d
    x, *_ = np.linalg.lstsq(np.eye(2) - g.m, g.v, rcond=None)
    c = np.zeros(2) if centroid is None else np.asarray(centroid, dtype=float)
    foot = x + np.dot(c - x, d) * d
    return Line(foot, d)


def reflection_self_matches(group, P, tol: float = 1e-9) -> List[ReflectionMatch]:
    """Orientation-reversing self-equivalences realized by reversed relabelings."""
    group = GroupId.parse(group)
    if not group.has_reflections:
        raise ValueError(f"{group.name} has no orientation-reversing elements")
    P = validate_polygon(_vertices(P), group)
    p, k = P.vertices, P.k
    sig_f = signature(group, P, FORWARD)
    sig_r = signature(group, P, REVERSED)
    stol = signature_tolerance(tol, sig_f.points, sig_r.points)
    res_tol = _geometric_tolerance(tol, p)
    centroid = p.mean(axis=0)
    out = []
    for c in sorted(cyclic_match(sig_f, sig_r, stol)):
        h = HkElement(c, True)
        hit = _verify(group, p, hk_apply(h, p), tol, res_tol)
        if hit is None or hit.g.det >= 0:
            continue
        axis = fixed_line(hit.g, centroid) if group is GroupId.E2 else None
        out.append(ReflectionMatch(c, _axis_type(c, k), hit.g, axis, hit.residual))
    return out


def reflection_axes_e2(P, tol: float = 1e-9) -> List[Line]:
    return [m.axis for m in reflection_self_matches(GroupId.E2, P, tol)]


def symmetry_report(group, P, tol: float = 1e-9) -> SymmetryReport:
    """Verified rotational folds and, for E2/SKA2, reflection self-matches."""
    group = GroupId.parse(group)
    P = validate_polygon(_vertices(P), group)
    p, k = P.vertices, P.k
    sig = signature(group, P)
    stol = signature_tolerance(tol, sig.points)
    res_tol = _geometric_tolerance(tol, p)
    rot, rev = [], []
    for c in sorted(cyclic_match(sig, sig, stol)):
        hit = _verify(group, p, hk_apply(HkElement(c, False), p), tol, res_tol)
        if hit is None:
            continue
        (rot if hit.g.det > 0 else rev).append(c)
    d = next(c for c in _divisors(k) if c % k in rot)
    refl = reflection_self_matches(group, P, tol) if group.has_reflections else []
    return SymmetryReport(k // d, rot, refl, rev)


# -- partial equivalence -----------------------------------------------------


def _cyclic_anchors(group: GroupId, pts: np.ndarray) -> np.ndarray:
    stack = np.stack([np.roll(pts, -j, axis=0) for j in range(group.anchor_width)])
    return anchor_invariants(group, stack)


def partial_match(group, P, Q, min_len: Optional[int] = None, tol: float = 1e-9) -> List[PartialMatch]:
    """All maximal runs of consecutive vertices of P equivalent to a run of Q.

    A start pair is nominated when its anchor invariants and first window
    invariants agree; the group element recovered from the anchor is then
    extended vertex by vertex. Runs that could be extended backwards are
    dropped (the same run is found from its true start).
    """
    group = GroupId.parse(group)
    n = group.window
    if min_len is None:
        min_len = n
    if min_len < n:
        raise ValueError(f"min_len must be at least the window width {n}")
    P = validate_polygon(_vertices(P), group)
    Q = validate_polygon(_vertices(Q), group)
    p, k = P.vertices, P.k
    l = Q.k
    cap = min(k, l)
    n1 = group.anchor_width
    res_tol = _geometric_tolerance(tol, p, Q.vertices)
    sig_p = window_invariants(group, p)
    anc_p = _cyclic_anchors(group, p)
    out = []
    for rev in (False, True):
        q = Q.vertices[::-1] if rev else Q.vertices
        sig_q = window_invariants(group, q)
        anc_q = _cyclic_anchors(group, q)
        stol = signature_tolerance(tol, sig_p, sig_q)
        atol = signature_tolerance(tol, anc_p, anc_q)
        seeds = np.all(np.abs(sig_p[:, None, :] - sig_q[None, :, :]) <= stol, axis=-1)
        if anc_p.shape[-1]:
            seeds &= np.all(np.abs(anc_p[:, None, :] - anc_q[None, :, :]) <= atol, axis=-1)
        steps = np.arange(cap)
        for i, j in zip(*np.nonzero(seeds)):
            ip = (i + steps) % k
            jq = (j + steps) % l
            try:
                g = recover(group, p[ip[:n1]], q[jq[:n1]], tol=tol)
            except JointSigError:
                continue
            d = np.hypot(*(apply(g, p[ip]) - q[jq]).T)
            bad = np.flatnonzero(d > res_tol)
            L = int(bad[0]) if bad.size else cap
            if L < min_len:
                continue
            if dist(apply(g, p[(i - 1) % k]), q[(j - 1) % l]) <= res_tol:
                # extendable backwards: found again from the true start, unless
                # the run wraps fully, where one canonical start is kept
                if L < cap or (k <= l and i != 0) or (k > l and j != 0):
                    continue
            start_q = (l - 1 - j) if rev else j
            out.append(
                PartialMatch(int(i) + 1, int(start_q) + 1, L, rev, g, float(d[:L].max()))
            )
    out.sort(key=lambda m: (m.reversed, m.start_p, m.start_q))
    return out


# -- next-vertex reconstruction ---------------------------------------------


def _perp(d):
    return np.array([-d[1], d[0]])


def _solve_affine_next(p1, p2, p3, a234: float, a124: float) -> np.ndarray:
    # a234 = 1/2 (p3-p2)^(p3-x) and a124 = 1/2 (p2-p1)^(p2-x) are linear in x
    u = p3 - p2
    w = p2 - p1
    rows = np.array([[-u[1], u[0]], [-w[1], w[0]]])
    rhs = np.array([
        (u[0] * p3[1] - u[1] * p3[0]) - 2.0 * a234,
        (w[0] * p2[1] - w[1] * p2[0]) - 2.0 * a124,
    ])
    return np.linalg.solve(rows, rhs)


def _candidates(group: GroupId, pre: np.ndarray, c1: float, c2: float) -> List[np.ndarray]:
    p1, p2 = pre[0], pre[1]
    d = p2 - p1
    ld = float(np.hypot(*d))
    if group is GroupId.SIM2:
        return [p1 + c2 * d - 2.0 * c1 * _perp(d)]
    if group is GroupId.SE2:
        # offset line parallel to p1p2, intersected with circle about p2
        u = d / ld
        h = -2.0 * c2 / ld
        nrm = _perp(u)
        disc = c1 * c1 - h * h
        scale = max(c1 * c1, h * h, 1e-300)
        if disc < -1e-12 * scale:
            return []
        if disc <= 1e-12 * scale:
            return [p2 + h * nrm]
        s = math.sqrt(disc)
        return [p2 + s * u + h * nrm, p2 - s * u + h * nrm]
    p3 = pre[2]
    a123 = 0.5 * ((p2[0] - p1[0]) * (p2[1] - p3[1]) - (p2[1] - p1[1]) * (p2[0] - p3[0]))
    if group is GroupId.SA2:
        return [_solve_affine_next(p1, p2, p3, c1, c2)]
    if group is GroupId.SKA2:
        s = math.copysign(1.0, a123)
        return [_solve_affine_next(p1, p2, p3, s * c1, s * c2)]
    # E2: |x - p3| = c1, |x - p2| = |c2|, sign(a123 a234) = sign(c2)
    r1, r2 = c1, abs(c2)
    if r2 == 0:
        return []
    e = p3 - p2
    de = float(np.hypot(*e))
    a = (r2 * r2 - r1 * r1 + de * de) / (2.0 * de)
    h2 = r2 * r2 - a * a
    scale = max(r2 * r2, 1e-300)
    if h2 < -1e-12 * scale:
        return []
    hh = math.sqrt(max(h2, 0.0))
    base = p2 + (a / de) * e
    nrm = _perp(e / de)
    want = math.copysign(1.0, c2) * math.copysign(1.0, a123)
    out = []
    for x in (base + hh * nrm, base - hh * nrm):
        a234 = 0.5 * ((p3[0] - p2[0]) * (p3[1] - x[1]) - (p3[1] - p2[1]) * (p3[0] - x[0]))
        if a234 * want > 0:
            out.append(x)
    return out


def reconstruct_next(group, prefix, sp) -> List[np.ndarray]:
    """Every next vertex ``x`` with ``window_invariant(prefix + [x]) == sp``.

    One solution for E2, SA2, SKA2 and SIM2; up to two for SE2.
    """
    group = GroupId.parse(group)
    pre = as_points(prefix)
    if len(pre) != group.anchor_width:
        raise ValueError(f"{group.name} prefixes have {group.anchor_width} points")
    c1, c2 = float(sp[0]), float(sp[1])
    span = max(dist(pre[a], pre[b]) for a in range(len(pre)) for b in range(a + 1, len(pre)))
    if span <= 1e-12 * max(1.0, float(np.abs(pre).max())):
        raise DegenerateAnchor("prefix points coincide")
    if len(pre) == 3 and is_collinear(*pre):
        raise DegenerateAnchor("prefix points are collinear")
    tol = 1e-9 * max(1.0, abs(c1), abs(c2))
    out = []
    for x in _candidates(group, pre, c1, c2):
        try:
            got = window_invariant(group, np.vstack([pre, x]))
        except JointSigError:
            continue
        if abs(got.c1 - c1) <= tol and abs(got.c2 - c2) <= tol:
            out.append(x)
    if not out:
        raise EmptySolution(f"no {group.name} next vertex reproduces {tuple(sp)}")
    return out
