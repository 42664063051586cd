"""Minimal deterministic plot emitters: polyline SVG and numeric CSV.

The CSV is the authoritative data form; the SVG is a quick look. Output is
a pure function of the input (fixed-precision coordinates, no timestamps),
so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
from typing import Optional, Sequence

from .bayes import BenchmarkResult
from .fuzzy import UnitFuzzyNumber
from .lexicon import Lexicon

_WIDTH = 640
_HEIGHT = 360
_MARGIN = 40

# dark-to-light cycle; chosen for contrast on white
_STROKES = ("#1b6ca8", "#b02e0c", "#1e7a46", "#7a1e66", "#9a6a00", "#2b2b2b")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _x(t: float) -> float:
    return _MARGIN + t * (_WIDTH - 2 * _MARGIN)


def _y(t: float) -> float:
    return _HEIGHT - _MARGIN - t * (_HEIGHT - 2 * _MARGIN)


def _polyline(points: Sequence[tuple[float, float]], stroke: str) -> str:
    coords = " ".join(f"{_fmt(_x(px))},{_fmt(_y(py))}" for px, py in points)
    return f'<polyline fill="none" stroke="{stroke}" stroke-width="1.5" points="{coords}"/>'


def _frame(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_MARGIN}" y="24" font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(1))}" y2="{_fmt(_y(0))}" stroke="#888"/>',
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(0))}" y2="{_fmt(_y(1))}" stroke="#888"/>',
    ]


def _legend(names: Sequence[str]) -> list[str]:
    parts = []
    for i, name in enumerate(names):
        stroke = _STROKES[i % len(_STROKES)]
        y = 40 + 16 * i
        parts.append(
            f'<line x1="{_WIDTH - 170}" y1="{y}" x2="{_WIDTH - 150}" y2="{y}" '
            f'stroke="{stroke}" stroke-width="1.5"/>'
            f'<text x="{_WIDTH - 144}" y="{y + 4}" font-family="sans-serif" font-size="11">{name}</text>'
        )
    return parts


def _membership_points(f: UnitFuzzyNumber) -> list[tuple[float, float]]:
    pts = [(0.0, 0.0), (f.a, 0.0), (f.b, 1.0), (f.c, 1.0), (f.d, 0.0), (1.0, 0.0)]
    # collapse duplicate consecutive x for vertical ramps; SVG handles it fine
    return pts


def lexicon_svg(lexicon: Lexicon) -> str:
    """Possibility functions of every label on one unit-interval chart."""
    parts = _frame(f"lexicon: {lexicon.owner}")
    for i, label in enumerate(lexicon.labels):
        parts.append(_polyline(_membership_points(label.meaning), _STROKES[i % len(_STROKES)]))
    parts.extend(_legend([label.name for label in lexicon.labels]))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def lexicon_csv(lexicon: Lexicon) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["label", "a", "b", "c", "d"])
    for label in lexicon.labels:
        writer.writerow([label.name] + [repr(v) for v in label.meaning])
    return out.getvalue()


def curve_svg(rows: Sequence[dict], title: str = "calibration curve") -> str:
    """Label medians against mean model probability (both on [0,1]).

    Rows need ``median`` and ``mean_probability`` keys, as in the curve CSV.
    """
    parts = _frame(title)
    parts.append(_polyline([(0.0, 0.0), (1.0, 1.0)], "#bbb"))  # identity reference
    pts = [(float(r["median"]), float(r["mean_probability"])) for r in rows]
    parts.append(_polyline(pts, _STROKES[0]))
    for px, py in pts:
        parts.append(
            f'<circle cx="{_fmt(_x(px))}" cy="{_fmt(_y(py))}" r="3" fill="{_STROKES[0]}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bench_svg(rows: Sequence[dict], title: str = "revision benchmark") -> str:
    """Mean absolute deviation per step, one polyline per responder kind.

    Rows need ``step``, ``kind`` and ``mean_abs_deviation`` keys. Deviations
    are plotted against the largest value present so thin differences stay
    visible.
    """
    by_kind: dict[str, list[tuple[int, float]]] = {}
    for r in rows:
        by_kind.setdefault(str(r["kind"]), []).append(
            (int(r["step"]), float(r["mean_abs_deviation"]))
        )
    max_step = max((s for pts in by_kind.values() for s, _ in pts), default=1)
    max_dev = max((v for pts in by_kind.values() for _, v in pts), default=1.0) or 1.0
    parts = _frame(title)
    for i, (kind, pts) in enumerate(by_kind.items()):
        pts.sort()
        scaled = [((s - 1) / max(1, max_step - 1), v / max_dev) for s, v in pts]
        parts.append(_polyline(scaled, _STROKES[i % len(_STROKES)]))
    parts.extend(_legend(list(by_kind)))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def benchmark_rows(result: BenchmarkResult) -> list[dict]:
    return [
        {"step": r.step, "kind": r.kind, "mean_abs_deviation": r.mean_abs_deviation}
        for r in result.rows
    ]
