import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointsig.errors import (
    DegenerateAnchor,
    EmptySolution,
    GroupMismatch,
    LengthMismatch,
    TooFewVertices,
)
from jointsig.geom import GroupId, HkElement, Polygon, diameter, hk_apply
from jointsig.groups import GroupElement, apply, random_element, residual, rotation
from jointsig.matching import (
    EDGE_AXIS,
    VERTEX_AXIS,
    cyclic_match,
    equivalence_candidates,
    equivalence_test,
    partial_match,
    reconstruct_next,
    reflection_axes_e2,
    reflection_self_matches,
    rotational_folds,
    symmetry_report,
)
from jointsig.oracle import FixtureSpec, brute_force_equivalent, make_symmetric_polygon, random_polygon
from jointsig.signatures import signature, window_invariant

from conftest import ALL_GROUPS, RECT_2x1, SCALENE_QUAD, SCALENE_TRIANGLE, UNIT_SQUARE, centered

S_RECT = [(1, -1), (2, -1), (1, -1), (2, -1)]


# -- cyclic_match ------------------------------------------------------------


def brute_shifts(a, b, tol):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return {c for c in range(len(a)) if np.all(np.abs(a - np.roll(b, -c, axis=0)) <= tol)}


def test_cyclic_match_examples():
    assert cyclic_match(S_RECT, S_RECT, 0) == {0, 2}
    assert cyclic_match(S_RECT, hk_apply(HkElement(1, False), S_RECT), 0) == {1, 3}
    sq = signature("se2", UNIT_SQUARE)
    assert cyclic_match(sq, signature("se2", RECT_2x1), 0) == set()


@pytest.mark.parametrize("method", ["exact", "direct"])
def test_cyclic_match_methods_agree_with_brute_force(method):
    rng = np.random.default_rng(0)
    for _ in range(200):
        k = int(rng.integers(1, 12))
        a = rng.integers(0, 3, size=(k, 2)).astype(float)
        b = np.roll(a, int(rng.integers(0, k)), axis=0) if rng.random() < 0.5 else rng.integers(0, 3, size=(k, 2)).astype(float)
        assert cyclic_match(a, b, 0, method) == brute_shifts(a, b, 0)


def test_cyclic_match_quantized_on_grid():
    a = np.array(S_RECT) * 0.25
    b = np.roll(a, 1, axis=0)
    assert cyclic_match(a, b, 0.25, "quantized") == {1, 3}
    with pytest.raises(ValueError):
        cyclic_match(a, b, 0, "quantized")


def test_cyclic_match_tolerant():
    a = np.array(S_RECT, float)
    b = a + 1e-10
    assert cyclic_match(a, b, 0) == set()
    assert cyclic_match(a, b, 1e-9) == {0, 2}


def test_cyclic_match_errors():
    with pytest.raises(LengthMismatch):
        cyclic_match(S_RECT, S_RECT[:3])
    with pytest.raises(GroupMismatch):
        cyclic_match(signature("se2", UNIT_SQUARE), signature("sim2", UNIT_SQUARE))
    with pytest.raises(ValueError):
        cyclic_match(S_RECT, S_RECT, method="fuzzy")


# -- equivalence -------------------------------------------------------------


def test_square_rotated_about_point():
    g = GroupElement(rotation(math.pi / 2), (0, 0), "se2")
    centre = np.array([5.0, 5.0])
    Q = (np.asarray(UNIT_SQUARE) - centre) @ g.m.T + centre
    res = equivalence_test("se2", UNIT_SQUARE, Q)
    assert res.matched and res.residual <= 1e-9
    assert residual(res.g, Polygon(UNIT_SQUARE), hk_apply(res.h, Polygon(Q))) <= 1e-9


def test_mirror_image_needs_reflections():
    mirror = [(x, -y) for x, y in SCALENE_QUAD]
    assert not equivalence_test("se2", SCALENE_QUAD, mirror)
    res = equivalence_test("e2", SCALENE_QUAD, mirror)
    assert res.matched and res.g.det == pytest.approx(-1)
    assert brute_force_equivalent("se2", SCALENE_QUAD, mirror).matched is False


def test_square_vs_rectangle():
    assert not equivalence_test("se2", UNIT_SQUARE, RECT_2x1)


def test_different_vertex_counts_do_not_match():
    assert not equivalence_test("se2", UNIT_SQUARE, [(0, 0), (1, 0), (1, 1), (0.5, 1.5), (0, 1)])


def test_tie_break_smallest_shift_forward_first():
    res = equivalence_test("e2", UNIT_SQUARE, UNIT_SQUARE)
    assert res.h == HkElement(0, False)
    every = equivalence_candidates("e2", UNIT_SQUARE, UNIT_SQUARE)
    assert len(every) == 8
    assert [m.h.reversed for m in every] == [False] * 4 + [True] * 4


@pytest.mark.parametrize("group", ALL_GROUPS)
def test_matches_are_sound(group):
    for seed in range(30):
        P = random_polygon(6, seed, group)
        g = random_element(group, seed + 100)
        h = HkElement(seed % 6, bool(seed % 2))
        Q = apply(g, hk_apply(h, P))
        res = equivalence_test(group, P, Q, 1e-9)
        assert res.matched
        # independent re-verification
        back = np.max(np.hypot(*(apply(res.g, P.vertices) - hk_apply(res.h, Q).vertices).T))
        assert back <= 1e-9 * max(diameter(P.vertices), diameter(Q.vertices))


# -- symmetry ----------------------------------------------------------------


def test_rotational_folds_examples():
    assert rotational_folds(signature("se2", UNIT_SQUARE)) == 4
    assert rotational_folds(np.array(S_RECT, float)) == 2
    assert rotational_folds(signature("se2", SCALENE_QUAD)) == 1


def test_rotational_folds_shift_equivariance():
    P = make_symmetric_polygon(FixtureSpec(3, [(2.0, 0.1), (1.0, 0.7), (0.8, 0.2)]))
    base = rotational_folds(signature("se2", P), 1e-9)
    for c in range(P.k):
        assert rotational_folds(signature("se2", hk_apply(HkElement(c, False), P)), 1e-9) == base


def test_reflection_self_matches_square():
    ms = reflection_self_matches("e2", UNIT_SQUARE)
    assert len(ms) == 4
    assert sorted(m.axis_type for m in ms) == [EDGE_AXIS] * 2 + [VERTEX_AXIS] * 2
    assert all(m.g.det == pytest.approx(-1) for m in ms)


def test_reflection_self_matches_rectangle():
    ms = reflection_self_matches("e2", RECT_2x1)
    assert [m.axis_type for m in ms] == [EDGE_AXIS, EDGE_AXIS]


def test_reflection_self_matches_asymmetric():
    assert reflection_self_matches("e2", SCALENE_QUAD) == []
    # E2 windows span four vertices, so triangles are outside the domain
    with pytest.raises(TooFewVertices):
        reflection_self_matches("e2", SCALENE_TRIANGLE)


def test_reflection_self_matches_rejects_orientation_preserving_groups():
    with pytest.raises(ValueError):
        reflection_self_matches("se2", UNIT_SQUARE)


def test_odd_k_axes_are_vertex_type():
    pent = [(math.cos(2 * math.pi * j / 5), math.sin(2 * math.pi * j / 5)) for j in range(5)]
    ms = reflection_self_matches("e2", pent)
    assert len(ms) == 5
    assert {m.axis_type for m in ms} == {VERTEX_AXIS}


def _as_line_set(lines):
    return sorted((round(l.direction[0], 9) + 0.0, round(l.direction[1], 9) + 0.0) for l in lines)


def test_reflection_axes_square():
    lines = reflection_axes_e2(centered(UNIT_SQUARE))
    r = math.sqrt(0.5)
    expected = sorted((round(x, 9) + 0.0, round(y, 9) + 0.0) for x, y in [(1, 0), (0, 1), (r, r), (-r, r)])
    assert _as_line_set(lines) == expected
    for l in lines:
        assert np.allclose(l.point, 0, atol=1e-12)


def test_reflection_axes_rectangle():
    lines = reflection_axes_e2(centered(RECT_2x1))
    assert _as_line_set(lines) == [(0.0, 1.0), (1.0, 0.0)]


def test_reflection_axes_follow_the_polygon():
    # axes of a moved square are the moved axes
    g = GroupElement(rotation(0.4), (3, -2), "e2")
    P = apply(g, centered(UNIT_SQUARE))
    for l in reflection_axes_e2(P):
        assert np.allclose(l.point, (3, -2), atol=1e-9)
        refl = 2 * np.outer(l.direction, l.direction) - np.eye(2)
        image = (P - l.point) @ refl.T + l.point
        assert brute_force_equivalent("e2", P, image, 1e-9)
        assert np.allclose(sorted(map(tuple, image.round(9))), sorted(map(tuple, P.round(9))))


@pytest.mark.parametrize("f", [2, 3, 4, 6])
def test_fold_constructions(f):
    rng = np.random.default_rng(f)
    for trial in range(5):
        # three points per wedge; two-point motifs give parallelograms at f=2,
        # which are affine squares
        r = rng.uniform(0.5, 2.0, size=3)
        t = np.sort(rng.uniform(0.05, 2 * math.pi / f - 0.05, size=2))
        motif = [(r[0], 0.0)] + [(r[i + 1] * math.cos(t[i]), r[i + 1] * math.sin(t[i])) for i in range(2)]
        P = make_symmetric_polygon(FixtureSpec(f, motif))
        assert rotational_folds(signature("se2", P), 1e-9) == f
        shear = random_element("sa2", 10 * f + trial)
        Ps = make_symmetric_polygon(FixtureSpec(f, motif, shear))
        assert rotational_folds(signature("sa2", Ps), 1e-9) == f
        assert symmetry_report("sa2", Ps).folds == f


def test_symmetry_report_rectangle():
    rep = symmetry_report("e2", RECT_2x1)
    assert rep.folds == 2
    assert rep.rotation_shifts == [0, 2]
    assert len(rep.reflection_matches) == 2
    assert rep.reversing_shifts == []


# -- partial matching --------------------------------------------------------


def test_partial_self_match_square():
    runs = partial_match("se2", UNIT_SQUARE, UNIT_SQUARE, 3)
    full = [m for m in runs if m.length == 4 and not m.reversed and m.start_q == 1]
    assert len(full) == 1
    assert np.allclose(full[0].g.m, np.eye(2)) and np.allclose(full[0].g.v, 0)


def test_partial_square_vs_kite():
    Q = [(0, 0), (1, 0), (1, 1), (0, 2)]
    runs = partial_match("se2", UNIT_SQUARE, Q, 3)
    assert max(m.length for m in runs) == 3
    ident = [m for m in runs if m.start_p == 1 and m.start_q == 1 and not m.reversed]
    assert len(ident) == 1 and ident[0].length == 3
    assert np.allclose(ident[0].g.m, np.eye(2), atol=1e-12)
    assert np.allclose(ident[0].g.v, 0, atol=1e-12)


def test_partial_min_len_below_window():
    with pytest.raises(ValueError):
        partial_match("e2", UNIT_SQUARE, UNIT_SQUARE, 3)


def brute_runs(group, p, q, g_tol):
    """Maximal forward runs of P mapped onto Q, found by trying every (i, j)."""
    from jointsig.groups import recover

    k, l = len(p), len(q)
    n1 = group.anchor_width
    runs = set()
    for i in range(k):
        for j in range(l):
            try:
                g = recover(group, p[[(i + t) % k for t in range(n1)]], q[[(j + t) % l for t in range(n1)]])
            except Exception:
                continue
            L = 0
            while L < min(k, l) and np.hypot(*(apply(g, p[(i + L) % k]) - q[(j + L) % l])) <= g_tol:
                L += 1
            back = np.hypot(*(apply(g, p[(i - 1) % k]) - q[(j - 1) % l])) <= g_tol
            if L >= group.window and (L == min(k, l) or not back):
                runs.add((i + 1, j + 1, L))
    return runs


@pytest.mark.parametrize("group", [GroupId.SE2, GroupId.SA2])
def test_partial_displaced_vertex(group):
    P = random_polygon(9, 3, group)
    g = random_element(group, 8)
    Q = apply(g, P.vertices).copy()
    Q[4] += (0.3, -0.2)
    runs = partial_match(group, P, Q, group.window)
    fwd = [m for m in runs if not m.reversed]
    # the only piece avoiding vertex 5 is the k-1 run starting right after it
    assert [(m.start_p, m.start_q, m.length) for m in fwd] == [(6, 6, 8)]
    tol = 1e-9 * max(diameter(P.vertices), diameter(Q))
    assert {(m.start_p, m.start_q, m.length) for m in fwd} == brute_runs(group, P.vertices, Q, tol)


def test_partial_reversed_run():
    P = random_polygon(7, 21, "se2")
    g = random_element("se2", 2)
    Q = apply(g, P.vertices[::-1])
    runs = [m for m in partial_match("se2", P, Q, 3) if m.reversed]
    assert len(runs) == 1 and runs[0].length == 7
    # walking Q backwards from start_q retraces P from start_p
    m = runs[0]
    idx_p = [(m.start_p - 1 + t) % 7 for t in range(7)]
    idx_q = [(m.start_q - 1 - t) % 7 for t in range(7)]
    assert np.allclose(apply(m.g, P.vertices[idx_p]), Q[idx_q], atol=1e-9)


# -- reconstruction ----------------------------------------------------------


def test_reconstruct_examples():
    (x,) = reconstruct_next("sa2", [(0, 0), (1, 0), (1, 1)], (-0.5, -0.5))
    assert np.allclose(x, (0, 1), atol=1e-12)
    sols = reconstruct_next("se2", [(0, 0), (1, 0)], (2, -0.5))
    got = sorted(tuple(np.round(s, 12)) for s in sols)
    r3 = math.sqrt(3)
    assert got == sorted([(round(1 - r3, 12), 1.0), (round(1 + r3, 12), 1.0)])
    with pytest.raises(EmptySolution):
        reconstruct_next("se2", [(0, 0), (1, 0)], (0.5, -0.5))


def test_reconstruct_degenerate_prefix():
    with pytest.raises(DegenerateAnchor):
        reconstruct_next("se2", [(1, 1), (1, 1)], (1, 0))
    with pytest.raises(DegenerateAnchor):
        reconstruct_next("sa2", [(0, 0), (1, 0), (2, 0)], (1, 1))
    with pytest.raises(ValueError):
        reconstruct_next("e2", [(0, 0), (1, 0)], (1, 1))


def test_reconstruct_se2_tangent_case_is_single():
    sols = reconstruct_next("se2", [(0, 0), (1, 0)], (1, -0.5))
    assert len(sols) == 1 and np.allclose(sols[0], (1, 1))


@pytest.mark.parametrize("group", ALL_GROUPS)
def test_reductivity_on_random_polygons(group):
    n = group.window
    for seed in range(20):
        P = random_polygon(8, 300 + seed, group).vertices
        for r in range(len(P)):
            w = P[[(r + t) % len(P) for t in range(n)]]
            sols = reconstruct_next(group, w[:-1], window_invariant(group, w))
            assert any(np.hypot(*(s - w[-1])) <= 1e-8 for s in sols)
            assert len(sols) <= (2 if group is GroupId.SE2 else 1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 5), st.floats(-3, 3))
def test_reconstruct_sim2_property(c1_mag, c2):
    # every SIMJIS value with c1 != 0 has exactly one preimage
    pre = [(0.3, -0.1), (1.4, 0.6)]
    (x,) = reconstruct_next("sim2", pre, (-c1_mag, c2))
    got = window_invariant("sim2", [*pre, tuple(x)])
    assert got.c1 == pytest.approx(-c1_mag, rel=1e-9) and got.c2 == pytest.approx(c2, rel=1e-9, abs=1e-9)


def test_crossed_rectangle_e2_symmetry():
    # self-crossing ordering of a 2x1 rectangle: advancing labels by 2 is
    # realized by the mirror x -> 2 - x, which SE2 cannot see
    P = [(0, 0), (2, 1), (2, 0), (0, 1)]
    rep = symmetry_report("e2", P)
    assert rep.reversing_shifts == [2]
    assert rep.rotation_shifts == symmetry_report("se2", P).rotation_shifts == [0]
    mirror = GroupElement([[-1, 0], [0, 1]], (2, 0), "e2")
    assert np.allclose(apply(mirror, np.array(P)), np.roll(P, -2, axis=0))
    # among reversed relabelings only c=0 (mirror y -> 1 - y) reverses orientation;
    # c=2 is the half-turn about (1, 0.5)
    assert [m.shift for m in rep.reflection_matches] == [0]
    assert np.allclose(rep.reflection_matches[0].g.m, np.diag([1, -1]))
    half_turn = GroupElement(-np.eye(2), (2, 1), "e2")
    assert np.allclose(apply(half_turn, np.array(P, float)), hk_apply(HkElement(2, True), np.array(P, float)))
