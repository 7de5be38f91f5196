"""Deterministic emission of score tables and association heatmaps."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

SIGNIFICANCE_LEVEL = 0.01

# sequential ramp endpoints (light to dark blue)
_RAMP_LO = (247, 251, 255)
_RAMP_HI = (8, 48, 107)


def _cell(dcor: float, p_value: float, alpha: float = SIGNIFICANCE_LEVEL) -> str:
    star = "*" if p_value < alpha else ""
    return f"{dcor:.2f}{star}"


def emit_score_table(reports: list, format: str = "csv",
                     alpha: float = SIGNIFICANCE_LEVEL) -> str:
    """Render per-target + CONC scores, one column per (model, method).

    Rows follow the targets of the first report, then CONC; cells are
    2-decimal dcor values, starred when p < alpha. Column order is the order
    the reports are given in.
    """
    if format not in ("csv", "markdown"):
        raise ValueError(f"unknown table format: {format!r}")
    if not reports:
        if format == "csv":
            return "target\n"
        return "| target |\n| ------ |\n"
    relation = reports[0].relation
    targets = list(reports[0].per_target.keys())
    for rep in reports:
        if rep.relation != relation:
            raise ValueError(
                f"mixed relations in one table: {relation!r} vs {rep.relation!r}")
        if list(rep.per_target.keys()) != targets:
            raise ValueError("reports disagree on the target list")
    header = ["target"] + [f"{rep.model}/{rep.method}" for rep in reports]
    rows = [[t] + [_cell(rep.per_target[t].dcor, rep.per_target[t].p_value, alpha)
                   for rep in reports]
            for t in targets]
    rows.append(["CONC"] + [_cell(rep.conc.dcor, rep.conc.p_value, alpha) for rep in reports])

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()

    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    def md_row(cells):
        return "| " + " | ".join(str(c).ljust(w) for c, w in zip(cells, widths)) + " |"
    lines = [md_row(header)]
    lines.append("| " + " | ".join("-" * w for w in widths) + " |")
    lines.extend(md_row(r) for r in rows)
    return "\n".join(lines) + "\n"


def ramp_color(t: float) -> str:
    """Hex color at position t in [0, 1] of the sequential ramp."""
    t = min(max(t, 0.0), 1.0)
    rgb = [round(lo + t * (hi - lo)) for lo, hi in zip(_RAMP_LO, _RAMP_HI)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _group_rows(assoc, gold) -> list[tuple[str, list[int]]]:
    """Source row indices grouped by their gold-argmax target, in target order."""
    g_src = {s: i for i, s in enumerate(gold.sources)}
    owner: dict[str, int] = {}
    for s in assoc.sources:
        if s in g_src:
            owner[s] = int(np.argmax(gold.values[g_src[s]]))
        else:
            owner[s] = len(gold.targets)  # sources unknown to gold sort last
    groups: list[tuple[str, list[int]]] = []
    labels = list(gold.targets) + ["(other)"]
    for j, label in enumerate(labels):
        rows = [i for i, s in enumerate(assoc.sources) if owner[s] == j]
        if rows:
            groups.append((label, rows))
    return groups


def render_heatmap(assoc, gold, title: str | None = None) -> str:
    """Self-contained SVG: sources on y grouped by gold-argmax target, targets on x.

    Cell fill is the sequential ramp over min-max normalized association
    values (a constant matrix maps to ramp position 0). Group separators are
    horizontal rules between gold-argmax groups. Output is byte-deterministic.
    """
    values = assoc.values
    vmin = float(values.min())
    vmax = float(values.max())
    span = vmax - vmin

    cell_w = max(44, 7 * max(len(t) for t in assoc.targets) + 8)
    cell_h = 16
    left = 8 * max(len(s) for s in assoc.sources) + 12
    top = 40 if title else 24
    groups = _group_rows(assoc, gold)
    n_rows = sum(len(rows) for _, rows in groups)
    width = left + cell_w * len(assoc.targets) + 8
    height = top + cell_h * n_rows + 8

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{left}" y="14" font-family="sans-serif" font-size="12" '
            f'font-weight="bold">{escape(title)}</text>'
        )
    for j, t in enumerate(assoc.targets):
        x = left + j * cell_w + cell_w // 2
        out.append(
            f'<text x="{x}" y="{top - 6}" font-family="sans-serif" font-size="10" '
            f'text-anchor="middle">{escape(t)}</text>'
        )
    y = top
    first = True
    for label, rows in groups:
        if not first:
            out.append(
                f'<line x1="0" y1="{y}" x2="{width}" y2="{y}" '
                f'stroke="#333333" stroke-width="2"/>'
            )
        first = False
        for i in rows:
            out.append(
                f'<text x="{left - 6}" y="{y + cell_h - 4}" font-family="sans-serif" '
                f'font-size="10" text-anchor="end">{escape(assoc.sources[i])}</text>'
            )
            for j in range(len(assoc.targets)):
                norm = (float(values[i, j]) - vmin) / span if span > 0 else 0.0
                out.append(
                    f'<rect x="{left + j * cell_w}" y="{y}" width="{cell_w}" '
                    f'height="{cell_h}" fill="{ramp_color(norm)}" '
                    f'stroke="#dddddd" stroke-width="0.5"/>'
                )
            y += cell_h
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_heatmap(assoc, gold, path: str | Path, title: str | None = None) -> None:
    """Write the heatmap SVG for an association matrix."""
    svg = render_heatmap(assoc, gold, title=title)
    Path(path).write_text(svg, encoding="utf-8")
