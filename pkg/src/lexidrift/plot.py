"""Static SVG rendering: radius-scaled scatter maps and anomaly timelines.

Output is plain SVG 1.1 text with fixed numeric formatting and elements
ordered by ascending doc_id, so identical inputs produce byte-identical
files. Circle radii encode the *raw* (unstandardized) feature value.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .anomaly import AnomalyReport
from .features import FeatureMatrix
from .tsne import Embedding

__all__ = ["ScatterSpec", "scatter_svg", "timeline_svg"]

# tab10-like palette cycled by year offset
_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
_FLAG_COLOR = "#d62728"
_NORMAL_COLOR = "#1f77b4"


@dataclass(frozen=True)
class ScatterSpec:
    radius_feature: str
    radius_range: tuple[float, float] = (3.0, 18.0)
    color_by: str = "year"  # "year" | "flag"
    width: int = 800
    height: int = 600
    padding: int = 40


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(values, lo_px, hi_px):
    vmin = min(values)
    vmax = max(values)
    if vmax == vmin:
        mid = 0.5 * (lo_px + hi_px)
        return lambda _: mid
    span = (hi_px - lo_px) / (vmax - vmin)
    return lambda v: lo_px + (v - vmin) * span


def scatter_svg(embedding: Embedding, features: FeatureMatrix, spec: ScatterSpec,
                out_path, dates: list[dt.date] | None = None,
                flags: list[bool] | None = None) -> None:
    """Write a 2-D scatter of the embedding, radius-scaled by a raw feature.

    ``features`` must cover the same doc_ids as the embedding. Radii map the
    feature value linearly from [min, max] onto ``spec.radius_range``; if all
    documents share one value every radius is the range midpoint. Every
    circle carries a ``<title>`` tooltip of the form ``doc_id: value``.
    """
    if list(features.doc_ids) != list(embedding.doc_ids):
        raise ValueError("embedding and feature matrix doc_ids differ")
    values = features.column(spec.radius_feature)  # KeyError on unknown name
    if spec.color_by == "flag" and flags is None:
        raise ValueError("color_by='flag' requires flags")

    order = sorted(range(len(embedding.doc_ids)), key=lambda i: embedding.doc_ids[i])
    rmax = max(spec.radius_range)
    inset = spec.padding + rmax
    sx = _scale(embedding.y[:, 0], inset, spec.width - inset)
    sy = _scale(embedding.y[:, 1], spec.height - inset, inset)  # y grows upward
    sr = _scale(values, spec.radius_range[0], spec.radius_range[1])

    if dates is None:
        dates = [None] * len(embedding.doc_ids)
    years = [d.year for d in dates if d is not None]
    min_year = min(years) if years else 0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect width="{spec.width}" height="{spec.height}" fill="white"/>',
    ]
    for i in order:
        if spec.color_by == "flag":
            color = _FLAG_COLOR if flags[i] else _NORMAL_COLOR
        elif dates[i] is not None:
            color = _PALETTE[(dates[i].year - min_year) % len(_PALETTE)]
        else:
            color = _NORMAL_COLOR
        doc_id = escape(embedding.doc_ids[i])
        parts.append(
            f'<circle cx="{_fmt(sx(embedding.y[i, 0]))}" '
            f'cy="{_fmt(sy(embedding.y[i, 1]))}" r="{_fmt(sr(values[i]))}" '
            f'fill="{color}" fill-opacity="0.65" stroke="#333333" stroke-width="0.5">'
            f'<title>{doc_id}: {values[i]:.6g}</title></circle>')
    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def timeline_svg(report: AnomalyReport, out_path,
                 width: int = 900, height: int = 220, padding: int = 50) -> None:
    """Write a date-axis timeline with one mark per document.

    Flagged documents render as larger filled red circles; unflagged ones as
    small gray circles. Vertical gridlines mark January 1 of each year.
    Same-date documents are stacked upward so each mark stays visible.
    """
    if not report.doc_ids:
        raise ValueError("cannot render a timeline for an empty report")
    lo = dt.date(min(d.year for d in report.dates), 1, 1)
    hi = dt.date(max(d.year for d in report.dates) + 1, 1, 1)
    span = max((hi - lo).days, 1)

    def x_of(date: dt.date) -> float:
        return padding + (date - lo).days / span * (width - 2 * padding)

    baseline = height - 60
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{padding}" y1="{baseline}" x2="{width - padding}" '
        f'y2="{baseline}" stroke="#333333" stroke-width="1"/>',
    ]
    for year in range(lo.year, hi.year + 1):
        gx = _fmt(x_of(dt.date(year, 1, 1)))
        parts.append(
            f'<line x1="{gx}" y1="30" x2="{gx}" y2="{baseline}" '
            f'stroke="#cccccc" stroke-width="0.5"/>')
        parts.append(
            f'<text x="{gx}" y="{baseline + 20}" font-size="11" '
            f'text-anchor="middle" fill="#333333">{year}</text>')

    order = sorted(range(len(report.doc_ids)), key=lambda i: report.doc_ids[i])
    stack: dict[dt.date, int] = {}
    for i in order:
        date = report.dates[i]
        level = stack.get(date, 0)
        stack[date] = level + 1
        cy = baseline - 8 - 12 * level
        doc_id = escape(report.doc_ids[i])
        if report.flags[i]:
            shape = (f'<circle class="flagged" cx="{_fmt(x_of(date))}" cy="{_fmt(cy)}" '
                     f'r="5" fill="{_FLAG_COLOR}" stroke="#333333" stroke-width="0.5">')
        else:
            shape = (f'<circle class="normal" cx="{_fmt(x_of(date))}" cy="{_fmt(cy)}" '
                     f'r="3" fill="#bbbbbb" stroke="#666666" stroke-width="0.5">')
        parts.append(f"{shape}<title>{doc_id}: {report.scores[i]:.6g}</title></circle>")
    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
