"""Diagram serialization: CSV rows, a JSON document and a standalone SVG plot.

Floats are written with ``repr`` so that a CSV or JSON round trip returns
the same binary values.  All writers go through :func:`atomic_write`.
"""

import csv
import io
import json
import math
import os
import tempfile
from contextlib import contextmanager
from xml.sax.saxutils import escape

from .branches import (
    KIND_ORDER,
    BranchId,
    BranchKind,
    BranchPoint,
    CriticalOrbits,
    Stability,
)
from .continuation import Diagram, SaddleNode
from .timemaps import CellParams, OrbitParam, Regime

__all__ = [
    "CSV_HEADER",
    "point_sort_key",
    "diagram_to_csv",
    "points_from_csv",
    "diagram_to_dict",
    "diagram_from_dict",
    "diagram_to_json",
    "diagram_from_json",
    "diagram_to_svg",
    "atomic_write",
    "write_outputs",
]

CSV_HEADER = ["branch", "k", "regime", "param", "energy", "L", "lambda", "y_minus", "y_plus", "stability"]
JSON_FORMAT = "twistmap-diagram"
JSON_VERSION = 1


def point_sort_key(point):
    return (KIND_ORDER[point.branch.kind], point.branch.k, point.energy)


def _f(x):
    return repr(float(x))


# ---------------------------------------------------------------------------
# CSV


def diagram_to_csv(diagram):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in sorted(diagram.all_points(), key=point_sort_key):
        w.writerow([
            p.branch.kind.value,
            p.branch.k,
            p.param.regime.value,
            _f(p.param.value),
            _f(p.energy),
            _f(p.L),
            _f(p.lam),
            _f(p.y_minus),
            _f(p.y_plus),
            p.stability.value,
        ])
    return buf.getvalue()


def _point_from_row(row):
    param = OrbitParam(Regime(row["regime"]), float(row["param"]))
    return BranchPoint(
        branch=BranchId(row["branch"], int(row["k"])),
        param=param,
        L=float(row["L"]),
        lam=float(row["lambda"]),
        y_minus=float(row["y_minus"]),
        y_plus=float(row["y_plus"]),
        stability=Stability(row["stability"]),
    )


def points_from_csv(text):
    """Branch points of a diagram CSV, in file order."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
    return [_point_from_row(row) for row in reader]


# ---------------------------------------------------------------------------
# JSON


def _param_dict(param):
    return {"regime": param.regime.value, "value": param.value, "energy": param.energy}


def _param_from(d):
    return OrbitParam(Regime(d["regime"]), float(d["value"]))


def _point_dict(p):
    return {
        "param": _param_dict(p.param),
        "L": p.L,
        "lambda": p.lam,
        "y_minus": p.y_minus,
        "y_plus": p.y_plus,
        "stability": p.stability.value,
    }


def diagram_to_dict(diagram, config=None):
    groups = []
    for branch in sorted(diagram.points):
        pts = sorted(diagram.points[branch], key=point_sort_key)
        groups.append({"branch": branch.kind.value, "k": branch.k, "points": [_point_dict(p) for p in pts]})
    out = {
        "format": JSON_FORMAT,
        "version": JSON_VERSION,
        "cell": {"phi0": diagram.cell.phi0, "phi1": diagram.cell.phi1},
        "settings": diagram.settings,
        "branches": groups,
        "criticals": [
            {"k": c.k, "T_star": c.T_star, "T_upper": c.T_upper, "y_abs": c.y_abs} for c in diagram.criticals
        ],
        "saddles": [
            {
                "branch": s.branch.kind.value,
                "k": s.branch.k,
                "param": _param_dict(s.param_at_min),
                "mtilde": s.mtilde,
                "L_sn": s.L_sn,
                "T_min": s.T_min,
            }
            for s in diagram.saddles
        ],
        "symmetric_overlay": None,
    }
    if config is not None:
        out["config"] = config
    if diagram.symmetric_overlay is not None:
        out["symmetric_overlay"] = diagram_to_dict(diagram.symmetric_overlay)
    return out


def diagram_from_dict(d):
    if d.get("format") != JSON_FORMAT:
        raise ValueError("not a diagram document")
    cell = CellParams(float(d["cell"]["phi0"]), float(d["cell"]["phi1"]))
    points = {}
    for g in d["branches"]:
        branch = BranchId(g["branch"], int(g["k"]))
        points[branch] = [
            BranchPoint(
                branch=branch,
                param=_param_from(p["param"]),
                L=float(p["L"]),
                lam=float(p["lambda"]),
                y_minus=float(p["y_minus"]),
                y_plus=float(p["y_plus"]),
                stability=Stability(p["stability"]),
            )
            for p in g["points"]
        ]
    criticals = [CriticalOrbits(int(c["k"]), c["T_star"], c["T_upper"], c["y_abs"]) for c in d["criticals"]]
    saddles = [
        SaddleNode(BranchId(s["branch"], int(s["k"])), _param_from(s["param"]), s["L_sn"], s["T_min"])
        for s in d["saddles"]
    ]
    overlay = d.get("symmetric_overlay")
    return Diagram(
        cell=cell,
        points=points,
        criticals=criticals,
        saddles=saddles,
        symmetric_overlay=diagram_from_dict(overlay) if overlay else None,
        settings=dict(d.get("settings", {})),
    )


def diagram_to_json(diagram, config=None):
    return json.dumps(diagram_to_dict(diagram, config), indent=1, allow_nan=False) + "\n"


def diagram_from_json(text):
    return diagram_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# SVG

_W, _H = 960, 640
_MARGIN = dict(left=70, right=30, top=40, bottom=55)
_STYLE = """
.axis { stroke: #222; stroke-width: 1; fill: none; }
.grid { stroke: #ddd; stroke-width: 0.5; fill: none; }
.tick { font: 11px sans-serif; fill: #222; }
.title { font: 14px sans-serif; fill: #000; }
.branch { stroke: #bbb; stroke-width: 0.6; fill: none; }
.stable { stroke: #1f4e9c; stroke-width: 2.2; fill: none; }
.unstable { stroke: #c0392b; stroke-width: 1.6; stroke-dasharray: 2 3; fill: none; }
.undetermined { stroke: #888; stroke-width: 1.2; fill: none; }
.overlay { stroke: #555; stroke-width: 1; stroke-dasharray: 7 4; fill: none; }
.sn { fill: #000; }
.critical { fill: #fff; stroke: #000; stroke-width: 1.2; }
.label { font: 12px serif; fill: #000; }
.slabel { font: italic 11px serif; fill: #1f4e9c; }
.ulabel { font: italic 11px serif; fill: #c0392b; }
"""

_STROKE = {Stability.STABLE: "stable", Stability.UNSTABLE: "unstable", Stability.UNDETERMINED: "undetermined"}
_LETTER = {Stability.STABLE: "s", Stability.UNSTABLE: "u"}


def _ordinate(point, which):
    return point.y_minus if which == "yminus" else point.y_plus


def _nice_ticks(lo, hi, n=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * span:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _fmt(v):
    return f"{v:.2f}"


def _runs(points):
    """Split a branch into maximal runs of equal stability, sharing ends."""
    runs = []
    start = 0
    for i in range(1, len(points) + 1):
        if i == len(points) or points[i].stability is not points[start].stability:
            runs.append((points[start].stability, points[start : min(i + 1, len(points))]))
            start = i
    return runs


def _critical_markers(diagram, which):
    out = []
    for c in diagram.criticals:
        for name, T in (("star", c.T_star), ("upper", c.T_upper)):
            y_m, y_p = c.ordinates(name, diagram.cell)
            y = y_m if which == "yminus" else y_p
            label = f"γ*{c.k}" if name == "star" else f"γ^*{c.k}"
            out.append((0.5 * T, y, label))
    return out


def diagram_to_svg(diagram, ordinate="yminus"):
    """Self-contained SVG of y(-L) (or y(L)) against L.

    Each (branch, k) group is one grey ``polyline``; stability is drawn on
    top as solid (``s``) or dotted (``u``) paths.  The symmetric overlay, if
    present, is dashed.  Saddle-nodes are filled dots labelled ``SN`` and
    critical orbits are open squares.
    """
    if ordinate not in ("yminus", "yL"):
        raise ValueError("ordinate must be 'yminus' or 'yL'")
    diagrams = [diagram] + ([diagram.symmetric_overlay] if diagram.symmetric_overlay is not None else [])
    xs, ys = [0.0], [0.0]
    for d in diagrams:
        for p in d.all_points():
            xs.append(p.L)
            ys.append(_ordinate(p, ordinate))
    for L, y, _ in _critical_markers(diagram, ordinate):
        xs.append(L)
        ys.append(y)
    x_lo, x_hi = 0.0, max(xs)
    y_lo, y_hi = min(ys), max(ys)
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, right, top, bottom = (_MARGIN[k] for k in ("left", "right", "top", "bottom"))
    pw, ph = _W - left - right, _H - top - bottom

    def px(L):
        return left + pw * (L - x_lo) / (x_hi - x_lo or 1.0)

    def py(y):
        return top + ph * (y_hi - y) / (y_hi - y_lo)

    def coords(pts):
        return " ".join(f"{_fmt(px(p.L))},{_fmt(py(_ordinate(p, ordinate)))}" for p in pts)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f"<style>{_STYLE}</style>",
    ]
    c = diagram.cell
    ylab = "y(-L)" if ordinate == "yminus" else "y(L)"
    out.append(
        f'<text class="title" x="{left}" y="22">{escape(ylab)} against L, '
        f"phi0 = {c.phi0:.6g}, phi1 = {c.phi1:.6g}</text>"
    )
    for t in _nice_ticks(x_lo, x_hi):
        out.append(f'<line class="grid" x1="{_fmt(px(t))}" y1="{top}" x2="{_fmt(px(t))}" y2="{top + ph}"/>')
        out.append(f'<text class="tick" x="{_fmt(px(t))}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        out.append(f'<line class="grid" x1="{left}" y1="{_fmt(py(t))}" x2="{left + pw}" y2="{_fmt(py(t))}"/>')
        out.append(f'<text class="tick" x="{left - 6}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append(f'<rect class="axis" x="{left}" y="{top}" width="{pw}" height="{ph}"/>')
    out.append(f'<text class="tick" x="{left + pw / 2}" y="{_H - 14}" text-anchor="middle">L</text>')
    out.append(
        f'<text class="tick" x="16" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + ph / 2})">{escape(ylab)}</text>'
    )

    overlay = diagram.symmetric_overlay
    if overlay is not None:
        out.append('<g id="overlay">')
        for branch in sorted(overlay.points):
            pts = overlay.points[branch]
            if len(pts) >= 2:
                out.append(f'<path class="overlay" data-branch="{branch.label}" d="M {coords(pts)}"/>')
        out.append("</g>")

    out.append('<g id="branches">')
    for branch in sorted(diagram.points):
        pts = diagram.points[branch]
        if not pts:
            continue
        out.append(f'<polyline class="branch" data-branch="{branch.label}" points="{coords(pts)}"/>')
        for stab, run in _runs(pts):
            if len(run) >= 2:
                out.append(f'<path class="{_STROKE[stab]}" data-branch="{branch.label}" d="M {coords(run)}"/>')
            letter = _LETTER.get(stab)
            if letter and len(run) >= 4:
                mid = run[len(run) // 2]
                out.append(
                    f'<text class="{letter}label" x="{_fmt(px(mid.L) + 4)}" '
                    f'y="{_fmt(py(_ordinate(mid, ordinate)) - 4)}">{letter}</text>'
                )
        end = pts[-1]
        # D runs alongside the stable C branch at large L: label it underneath
        dy = 14 if branch.kind is BranchKind.D else -6
        out.append(
            f'<text class="label" x="{_fmt(px(end.L) - 4)}" y="{_fmt(py(_ordinate(end, ordinate)) + dy)}" '
            f'text-anchor="end">{escape(branch.label)}</text>'
        )
    out.append("</g>")

    out.append('<g id="markers">')
    for s in diagram.saddles:
        pts = diagram.points.get(s.branch, [])
        match = [p for p in pts if p.param == s.param_at_min]
        if not match:
            continue
        x, y = px(s.L_sn), py(_ordinate(match[0], ordinate))
        out.append(f'<circle class="sn" data-branch="{s.branch.label}" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3.5"/>')
        out.append(f'<text class="label" x="{_fmt(x + 5)}" y="{_fmt(y + 14)}">SN</text>')
    for L, y, label in _critical_markers(diagram, ordinate):
        x, yy = px(L), py(y)
        out.append(f'<rect class="critical" x="{_fmt(x - 3.5)}" y="{_fmt(yy - 3.5)}" width="7" height="7"/>')
        out.append(f'<text class="label" x="{_fmt(x + 6)}" y="{_fmt(yy - 6)}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# files


@contextmanager
def atomic_write(path):
    """Yield a text handle whose content replaces ``path`` only on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(diagram, csv_path=None, json_path=None, svg_path=None, config=None, ordinate="yminus"):
    """Render every requested file first, then move them into place.

    If rendering or writing fails, none of the requested files is left
    behind in a partial state.
    """
    targets = [(p, kind) for p, kind in ((csv_path, "csv"), (json_path, "json"), (svg_path, "svg")) if p]
    paths = [os.path.abspath(p) for p, _ in targets]
    if len(set(paths)) != len(paths):
        raise ValueError("output paths must be distinct")
    render = {
        "csv": lambda: diagram_to_csv(diagram),
        "json": lambda: diagram_to_json(diagram, config),
        "svg": lambda: diagram_to_svg(diagram, ordinate),
    }
    texts = [(p, render[kind]()) for p, kind in targets]
    written = []
    try:
        for p, text in texts:
            with atomic_write(p) as fh:
                fh.write(text)
            written.append(p)
    except BaseException:
        for p in written:
            os.unlink(p)
        raise
    return [p for p, _ in texts]
