"""Deterministic CSV, JSON and SVG writers.

Every artifact carries the run configuration and the tool version; nothing
time-dependent is written, so identical runs give identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import __version__

TOOL = "zerolaw"
WIDTH, HEIGHT = 800, 500
MARGIN = dict(left=70, right=160, top=40, bottom=60)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def envelope(config, result):
    return {"tool": TOOL, "version": __version__, "config": config, "result": result}


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _default(o):
    if hasattr(o, "to_json_obj"):
        return o.to_json_obj()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_json(path, config, result):
    Path(path).write_text(dumps(envelope(config, result)))


def csv_text(config, header, rows):
    buf = io.StringIO()
    buf.write(f"# {TOOL} {__version__}\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True, default=_default) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, float):
        return repr(round(x, 12))
    return x


def write_csv(path, config, header, rows):
    Path(path).write_text(csv_text(config, header, rows))


def _esc(s):
    return (str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("--", "- -"))


def svg_plot(curves, title, ylabel, config, xlabel="n (log scale)"):
    """Line plot with a log x axis.

    ``curves`` is a list of dicts with keys label, x, y and optionally lo/hi
    (drawn as whiskers).
    """
    xs = [x for c in curves for x in c["x"]]
    ys = [y for c in curves for y in c["y"]]
    ys += [v for c in curves for v in c.get("lo", []) + c.get("hi", [])]
    if not xs:
        xs, ys = [1, 10], [0, 1]
    lx0, lx1 = math.log10(min(xs)), math.log10(max(xs))
    if lx1 - lx0 < 1e-9:
        lx0, lx1 = lx0 - 0.5, lx1 + 0.5
    y0, y1 = min(ys + [0.0]), max(ys + [1.0])
    if y1 - y0 < 1e-12:
        y1 = y0 + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (math.log10(x) - lx0) / (lx1 - lx0) * pw

    def py(y):
        return MARGIN["top"] + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<!-- {TOOL} {__version__} config: {_esc(json.dumps(config, sort_keys=True, default=_default))} -->",
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16">{_esc(title)}</text>',
        f'<line x1="{MARGIN["left"]}" y1="{py(y0):.1f}" x2="{MARGIN["left"] + pw}" y2="{py(y0):.1f}" stroke="black"/>',
        f'<line x1="{MARGIN["left"]}" y1="{MARGIN["top"]}" x2="{MARGIN["left"]}" y2="{py(y0):.1f}" stroke="black"/>',
    ]
    for e in range(math.floor(lx0), math.ceil(lx1) + 1):
        for m in (1, 2, 5):
            x = m * 10 ** e
            if lx0 - 1e-9 <= math.log10(x) <= lx1 + 1e-9:
                X = px(x)
                out.append(f'<line x1="{X:.1f}" y1="{py(y0):.1f}" x2="{X:.1f}" y2="{py(y0) + 5:.1f}" stroke="black"/>')
                out.append(f'<text x="{X:.1f}" y="{py(y0) + 20:.1f}" text-anchor="middle" font-size="11">{x:g}</text>')
    for i in range(6):
        y = y0 + (y1 - y0) * i / 5
        Y = py(y)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y:.1f}" x2="{MARGIN["left"]}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y + 4:.1f}" text-anchor="end" font-size="11">{y:.3g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{_esc(xlabel)}</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.1f})">{_esc(ylabel)}</text>')
    for k, c in enumerate(curves):
        col = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(c["x"], c["y"]))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="2"/>')
        for i, (x, y) in enumerate(zip(c["x"], c["y"])):
            out.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{col}"/>')
            if "lo" in c and "hi" in c:
                X = px(x)
                out.append(f'<line x1="{X:.1f}" y1="{py(c["lo"][i]):.1f}" x2="{X:.1f}" '
                           f'y2="{py(c["hi"][i]):.1f}" stroke="{col}"/>')
        ly = MARGIN["top"] + 18 * k + 10
        lx = MARGIN["left"] + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly + 4}" font-size="11">{_esc(c["label"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, curves, title, ylabel, config, xlabel="n (log scale)"):
    Path(path).write_text(svg_plot(curves, title, ylabel, config, xlabel))
