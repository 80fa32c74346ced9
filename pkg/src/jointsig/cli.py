"""Command-line interface.

Exit status: 0 on success (and on a match for ``compare``), 1 when
``compare`` finds no match or ``oracle-check`` finds a disagreement,
2 on usage, file or domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import JointSigError, TooFewVertices
from .geom import GroupId, HkElement, hk_apply
from .groups import random_element
from .matching import (
    equivalence_candidates,
    equivalence_test,
    partial_match,
    symmetry_report,
)
from .oracle import brute_force_equivalent, perturb, random_polygon
from .signatures import FORWARD, REVERSED, open_signature, signature

ALLOWED_FIELDS = {"vertices", "closed", "name"}


class PolygonFileError(JointSigError, ValueError):
    pass


@dataclass(frozen=True)
class PolygonDocument:
    vertices: List[Tuple[float, float]]
    closed: bool = True
    name: Optional[str] = None


def fmt(x: float) -> str:
    """Nine significant digits."""
    return format(float(x), "#.9g")


def _reject_constant(token):
    raise PolygonFileError(f"non-finite number {token!r} is not allowed")


def parse_polygon_text(text: str, source: str = "<string>") -> PolygonDocument:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise PolygonFileError(
            f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    except PolygonFileError as exc:
        raise PolygonFileError(f"{source}: {exc}") from None
    if not isinstance(doc, dict):
        raise PolygonFileError(f"{source}: top level must be a JSON object")
    unknown = sorted(set(doc) - ALLOWED_FIELDS)
    if unknown:
        raise PolygonFileError(f"{source}: unknown field(s): {', '.join(unknown)}")
    if "vertices" not in doc:
        raise PolygonFileError(f"{source}: missing field 'vertices'")
    raw = doc["vertices"]
    if not isinstance(raw, list):
        raise PolygonFileError(f"{source}: field 'vertices' must be a list")
    vertices = []
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise PolygonFileError(f"{source}: vertices[{i}] must be an [x, y] pair")
        for j, x in enumerate(pair):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise PolygonFileError(f"{source}: vertices[{i}][{j}] is not a number")
            if not math.isfinite(x):
                raise PolygonFileError(f"{source}: vertices[{i}][{j}] is not finite")
        vertices.append((float(pair[0]), float(pair[1])))
    if len(vertices) < 3:
        raise TooFewVertices(
            f"{source}: field 'vertices' needs at least 3 points, got {len(vertices)}"
        )
    closed = doc.get("closed", True)
    if not isinstance(closed, bool):
        raise PolygonFileError(f"{source}: field 'closed' must be true or false")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise PolygonFileError(f"{source}: field 'name' must be a string")
    return PolygonDocument(vertices, closed, name)


def parse_polygon_file(path) -> PolygonDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PolygonFileError(f"{path}: {exc.strerror}") from None
    return parse_polygon_text(text, str(path))


def dump_polygon(vertices, name: Optional[str] = None, closed: bool = True) -> str:
    doc = {"vertices": [[float(x), float(y)] for x, y in vertices]}
    if not closed:
        doc["closed"] = False
    if name is not None:
        doc["name"] = name
    return json.dumps(doc)


# -- output helpers ----------------------------------------------------------


def signature_csv(points) -> str:
    rows = ["c1,c2"] + [f"{fmt(a)},{fmt(b)}" for a, b in np.asarray(points)]
    return "\n".join(rows) + "\n"


def signature_svg(points, width: int = 480, height: int = 480) -> str:
    """Signature curve as a closed SVG polyline with an arrowhead on every segment."""
    pts = np.asarray(points, dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo, hi = lo - 0.05 * span, hi + 0.05 * span
    span = hi - lo
    sx = (pts[:, 0] - lo[0]) / span[0] * width
    sy = height - (pts[:, 1] - lo[1]) / span[1] * height
    ring = list(zip(sx, sy)) + [(sx[0], sy[0])]
    coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in ring)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        "  <defs>\n"
        '    <marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
        'markerWidth="8" markerHeight="8" orient="auto">\n'
        '      <path d="M 0 0 L 10 5 L 0 10 z" fill="black"/>\n'
        "    </marker>\n"
        "  </defs>\n"
        f'  <polyline points="{coords}" fill="none" stroke="black" stroke-width="1.5" '
        'marker-mid="url(#arrow)" marker-end="url(#arrow)"/>\n'
        "</svg>\n"
    )


def _matrix_text(m) -> str:
    return "[[" + "], [".join(", ".join(fmt(x) for x in row) for row in np.asarray(m)) + "]]"


def _vector_text(v) -> str:
    return "[" + ", ".join(fmt(x) for x in v) + "]"


def _element_json(g) -> dict:
    return {"matrix": np.asarray(g.m).tolist(), "translation": np.asarray(g.v).tolist()}


def _closed(doc: PolygonDocument, path) -> List[Tuple[float, float]]:
    if not doc.closed:
        raise PolygonFileError(f"{path}: this command needs a closed polygon")
    return doc.vertices


# -- commands ----------------------------------------------------------------


def cmd_sign(args, out) -> int:
    doc = parse_polygon_file(args.file)
    if doc.closed:
        direction = REVERSED if args.reversed else FORWARD
        pts = signature(args.group, doc.vertices, direction).points
        anchor = None
    else:
        osig = open_signature(args.group, doc.vertices)
        pts, anchor = osig.points, list(osig.anchor)
    fmt_ = args.format or "csv"
    if fmt_ == "csv":
        out.write(signature_csv(pts))
    elif fmt_ == "svg":
        out.write(signature_svg(pts))
    else:
        payload = {"group": args.group.value, "points": pts.tolist()}
        if anchor is not None:
            payload["anchor"] = anchor
        out.write(json.dumps(payload) + "\n")
    return 0


def cmd_plot(args, out) -> int:
    doc = parse_polygon_file(args.file)
    pts = signature(args.group, _closed(doc, args.file)).points
    text = signature_csv(pts) if args.format == "csv" else signature_svg(pts)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return 0


def _compare_pair(group, a, b, tol, exhaustive):
    if exhaustive:
        return equivalence_candidates(group, a, b, tol)
    res = equivalence_test(group, a, b, tol)
    return [res] if res.matched else []


def _match_lines(res) -> List[str]:
    return [
        "matched: yes",
        f"shift: {res.h.shift}",
        f"reversed: {'true' if res.h.reversed else 'false'}",
        f"matrix: {_matrix_text(res.g.m)}",
        f"translation: {_vector_text(res.g.v)}",
        f"residual: {fmt(res.residual)}",
    ]


def cmd_compare(args, out) -> int:
    if args.dir:
        files = sorted(Path(args.dir).glob("*.json"))
        docs = [(f, _closed(parse_polygon_file(f), f)) for f in files]
        any_match = False
        for i in range(len(docs)):
            for j in range(i + 1, len(docs)):
                (fa, a), (fb, b) = docs[i], docs[j]
                hit = len(a) == len(b) and equivalence_test(args.group, a, b, args.tol).matched
                any_match |= hit
                out.write(f"{fa.name} {fb.name}: {'match' if hit else 'no-match'}\n")
        return 0 if any_match else 1
    if len(args.files) != 2:
        raise _UsageError("compare needs two polygon files or --dir")
    a = _closed(parse_polygon_file(args.files[0]), args.files[0])
    b = _closed(parse_polygon_file(args.files[1]), args.files[1])
    hits = _compare_pair(args.group, a, b, args.tol, args.all) if len(a) == len(b) else []
    if args.format == "json":
        out.write(json.dumps({
            "matched": bool(hits),
            "matches": [
                {"shift": r.h.shift, "reversed": r.h.reversed, **_element_json(r.g),
                 "residual": r.residual}
                for r in hits
            ],
        }) + "\n")
    elif not hits:
        out.write("matched: no\n")
    else:
        for n, res in enumerate(hits):
            if n:
                out.write("\n")
            out.write("\n".join(_match_lines(res)) + "\n")
    return 0 if hits else 1


def cmd_symmetry(args, out) -> int:
    doc = parse_polygon_file(args.file)
    rep = symmetry_report(args.group, _closed(doc, args.file), args.tol)
    if args.format == "json":
        out.write(json.dumps({
            "folds": rep.folds,
            "rotation_shifts": rep.rotation_shifts,
            "reversing_shifts": rep.reversing_shifts,
            "reflections": [
                {"shift": m.shift, "axis_type": m.axis_type, **_element_json(m.g),
                 "axis": None if m.axis is None else {
                     "point": m.axis.point.tolist(),
                     "direction": m.axis.direction.tolist()}}
                for m in rep.reflection_matches
            ],
        }) + "\n")
        return 0
    out.write(f"folds: {rep.folds}\n")
    out.write("rotation shifts: " + " ".join(map(str, rep.rotation_shifts)) + "\n")
    if rep.reversing_shifts:
        out.write("orientation-reversing shifts: " + " ".join(map(str, rep.reversing_shifts)) + "\n")
    if args.group.has_reflections:
        out.write(f"reflections: {len(rep.reflection_matches)}\n")
        for m in rep.reflection_matches:
            line = f"  shift {m.shift} ({m.axis_type})"
            if m.axis is not None:
                line += f" axis through {_vector_text(m.axis.point)} along {_vector_text(m.axis.direction)}"
            out.write(line + "\n")
    return 0


def cmd_partial(args, out) -> int:
    a = _closed(parse_polygon_file(args.files[0]), args.files[0])
    b = _closed(parse_polygon_file(args.files[1]), args.files[1])
    runs = partial_match(args.group, a, b, args.min_len, args.tol)
    if args.format == "json":
        out.write(json.dumps([
            {"start_p": r.start_p, "start_q": r.start_q, "length": r.length,
             "reversed": r.reversed, **_element_json(r.g), "residual": r.residual}
            for r in runs
        ]) + "\n")
        return 0
    out.write(f"runs: {len(runs)}\n")
    for r in runs:
        out.write(
            f"P[{r.start_p}] ~ Q[{r.start_q}] length {r.length}"
            f"{' reversed' if r.reversed else ''} residual {fmt(r.residual)}\n"
        )
    return 0


def cmd_perturb(args, out) -> int:
    doc = parse_polygon_file(args.file)
    P = perturb(_closed(doc, args.file), args.eps, args.seed, args.group)
    out.write(dump_polygon(P.vertices, doc.name) + "\n")
    return 0


def cmd_oracle_check(args, out) -> int:
    group = args.group
    rng = np.random.default_rng(args.seed)
    disagreements = 0
    lo = max(3, group.window)
    for t in range(args.trials):
        k = args.k or int(rng.integers(lo, 11))
        P = random_polygon(k, int(rng.integers(2**31)), group)
        g = random_element(group, int(rng.integers(2**31)))
        h = HkElement(int(rng.integers(k)), bool(rng.integers(2)))
        Q = hk_apply(h, P.vertices) @ g.m.T + g.v
        R = random_polygon(k, int(rng.integers(2**31)), group)
        for other, expect in ((Q, True), (R, False)):
            fast = equivalence_test(group, P, other, args.tol).matched
            slow = brute_force_equivalent(group, P, other, args.tol).matched
            if fast != slow or fast != expect:
                disagreements += 1
                out.write(f"trial {t}: k={k} fast={fast} brute={slow} expected={expect}\n")
    out.write(f"trials: {2 * args.trials} disagreements: {disagreements}\n")
    return 0 if disagreements == 0 else 1


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", type=GroupId.parse, default=GroupId.SE2,
                        help="se2 | e2 | sa2 | ska2 | sim2 (default se2)")
    common.add_argument("--tol", type=float, default=1e-9, help="relative tolerance")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="jointsig", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sign", parents=[common], help="print a polygon's signature")
    p.add_argument("file")
    p.add_argument("--format", choices=["csv", "json", "svg"])
    p.add_argument("--reversed", action="store_true", help="traverse vertices backwards")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("compare", parents=[common], help="test two polygons for equivalence")
    p.add_argument("files", nargs="*")
    p.add_argument("--dir", help="compare every pair of *.json files in a directory")
    p.add_argument("--all", action="store_true", help="report every verifying relabeling")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("symmetry", parents=[common], help="rotational folds and reflections")
    p.add_argument("file")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("partial", parents=[common], help="maximal partially equivalent runs")
    p.add_argument("files", nargs=2)
    p.add_argument("--min-len", type=int, default=None)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_partial)

    p = sub.add_parser("perturb", parents=[common], help="add uniform coordinate noise")
    p.add_argument("file")
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="cross-check fast equivalence against brute force")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("plot", parents=[common], help="signature curve as SVG (or CSV)")
    p.add_argument("file")
    p.add_argument("--format", choices=["svg", "csv"], default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return ap


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (JointSigError, _UsageError, ValueError, OSError) as exc:
        err.write(f"jointsig {args.command}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
