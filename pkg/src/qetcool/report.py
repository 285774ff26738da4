"""
Row serialization: CSV, JSON and a dependency-free SVG line chart.

Numbers are written with 12 significant digits so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .sweeps import SWEEP_FIELDS, SweepRow

NUMBER_FORMAT = ".12g"


def fmt_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, NUMBER_FORMAT)
    return str(v)


def _header(rows: Sequence[SweepRow]) -> list[str]:
    with_method = any(r.method for r in rows)
    return (["method"] if with_method else []) + list(SWEEP_FIELDS)


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    header = _header(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        d = r.as_dict(with_method=header[0] == "method")
        w.writerow([fmt_number(d[k]) for k in header])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, float):
        return float(format(v, NUMBER_FORMAT)) if math.isfinite(v) else None
    return v


def rows_to_json(rows: Sequence[SweepRow]) -> str:
    header = _header(rows)
    data = []
    for r in rows:
        d = r.as_dict(with_method=header[0] == "method")
        data.append({k: _json_value(d[k]) for k in header})
    return json.dumps(data, indent=2) + "\n"


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]
    dashed: bool = False


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)


def _series_key(r: SweepRow) -> str:
    name = r.method or r.protocol
    return f"{name} k/h={fmt_number(r.k_over_h)}"


def chart_from_rows(rows: Sequence[SweepRow], title: str = "") -> Chart:
    """Final purity per (method, k/h) plus the dashed initial purity per k/h.

    Grids without ``beta`` (ground-state runs) are plotted against ``k/h``.
    """
    vs_k = all(r.beta is None for r in rows)
    xlabel = "k/h" if vs_k else "beta"
    chart = Chart(title or "purity of the target qubit", xlabel, "purity")
    finals: dict[str, Series] = {}
    initials: dict[str, Series] = {}
    for r in rows:
        x = r.k_over_h if vs_k else r.beta
        key = (r.method or r.protocol) if vs_k else _series_key(r)
        finals.setdefault(key, Series(key, [], [])).x.append(x)
        finals[key].y.append(r.purity_final)
        if r.method == "initial-ancilla":
            continue
        ikey = "initial" if vs_k else f"initial k/h={fmt_number(r.k_over_h)}"
        s = initials.setdefault(ikey, Series(ikey, [], [], dashed=True))
        if x not in s.x:
            s.x.append(x)
            s.y.append(r.purity_initial)
    chart.series = list(finals.values()) + list(initials.values())
    return chart


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _nice_range(lo, hi):
    if not math.isfinite(lo) or not math.isfinite(hi):
        return 0.0, 1.0
    if hi - lo < 1e-12:
        pad = max(abs(lo) * 0.05, 0.05)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def chart_to_svg(chart: Chart, width: int = 800, height: int = 600) -> str:
    """One ``<polyline>`` per series; legend swatches use ``<line>``."""
    left, right, top, bottom = 80, 220, 50, 70
    pw, ph = width - left - right, height - top - bottom
    xs = [x for s in chart.series for x in s.x]
    ys = [y for s in chart.series for y in s.y]
    x0, x1 = _nice_range(min(xs, default=0.0), max(xs, default=1.0))
    y0, y1 = _nice_range(min(ys, default=0.5), max(ys, default=1.0))

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.2f}" y="28" text-anchor="middle" font-size="16">{escape(chart.title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(6):
        xv = x0 + (x1 - x0) * i / 5
        yv = y0 + (y1 - y0) * i / 5
        out.append(f'<line x1="{px(xv):.2f}" y1="{top + ph}" x2="{px(xv):.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(xv):.2f}" y="{top + ph + 20}" text-anchor="middle" font-size="12">{xv:.3g}</text>')
        out.append(f'<line x1="{left - 5}" y1="{py(yv):.2f}" x2="{left}" y2="{py(yv):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(yv) + 4:.2f}" text-anchor="end" font-size="12">{yv:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 20}" text-anchor="middle" font-size="14">{escape(chart.xlabel)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.2f}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 20 {top + ph / 2:.2f})">{escape(chart.ylabel)}</text>')
    for i, s in enumerate(chart.series):
        color = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{pts}"/>')
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}" font-size="12">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_outputs(rows: Sequence[SweepRow], stem: str, formats: Iterable[str], title: str = "") -> list[str]:
    """Write each requested format next to ``stem``; returns the paths written."""
    written = []
    formats = list(formats)
    chart = chart_from_rows(rows, title) if {"svg", "png"} & set(formats) else None
    for f in formats:
        path = f"{stem}.{f}"
        if f == "csv":
            _write_text(path, rows_to_csv(rows))
        elif f == "json":
            _write_text(path, rows_to_json(rows))
        elif f == "svg":
            _write_text(path, chart_to_svg(chart))
        elif f == "png":
            from .plotting import render_png

            render_png(chart, path)
        else:
            raise ValueError(f"unknown format {f!r}")
        written.append(path)
    return written


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
