"""Render analysis results as aligned text, markdown, or plot-data CSV.

Every renderer takes the result object, never raw samples, so rendering can
be re-run without recomputation, and every renderer is deterministic: the
same result yields byte-identical output.  Numbers go through the shared
rounding helpers — means to one decimal, impact weights and relative ratings
to integers — so a rendered table is exactly the "published" form of the
analysis.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

from .analytics import (
    LoyaltyCurve,
    PriorityRanking,
    ProfileTable,
    ValueMapPoint,
)
from .nps import NpsResult, NpsVsCva
from .rounding import format_percent, format_rating, format_score

__all__ = [
    "render_profile_table",
    "render_priorities",
    "render_loyalty_curve",
    "render_value_map",
    "render_nps",
    "render_nps_vs_cva",
    "loyalty_plot_rows",
    "write_loyalty_plot",
    "value_map_rows",
    "write_value_map_plot",
]

_FORMATS = ("text", "markdown")


def _check_format(fmt: str) -> None:
    if fmt not in _FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {_FORMATS}")


def _text_table(
    headers: Sequence[str],
    rows: Iterable[Sequence[str]],
    align_left: Sequence[int] = (0,),
) -> list[str]:
    """Column-aligned plain text; columns in ``align_left`` are left-aligned."""
    materialized = [list(headers)] + [list(r) for r in rows]
    widths = [max(len(row[i]) for row in materialized) for i in range(len(headers))]

    def fmt_row(row: Sequence[str]) -> str:
        cells = []
        for i, cell in enumerate(row):
            if i in align_left:
                cells.append(cell.ljust(widths[i]))
            else:
                cells.append(cell.rjust(widths[i]))
        return "  ".join(cells).rstrip()

    lines = [fmt_row(materialized[0])]
    lines.append("-" * len(lines[0]))
    lines.extend(fmt_row(row) for row in materialized[1:])
    return lines


def _markdown_table(
    headers: Sequence[str],
    rows: Iterable[Sequence[str]],
    align_left: Sequence[int] = (0,),
) -> list[str]:
    lines = ["| " + " | ".join(headers) + " |"]
    lines.append(
        "| " + " | ".join("---" if i in align_left else "---:" for i in range(len(headers))) + " |"
    )
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


def render_profile_table(table: ProfileTable, fmt: str = "text") -> str:
    """One competitive profile table: children, weights, means, relatives.

    The footer row carries the parent's own means and relative rating; at
    the root that relative is labelled as the overall value score (CVA).
    """
    _check_format(fmt)
    headers = ["component", "impact", "own", "competitors", "relative"]
    rows = []
    half_widths = [table.parent_own.half_width]
    for row in table.rows:
        half_widths.append(row.own_mean.half_width)
        if row.competitor_mean is not None:
            half_widths.append(row.competitor_mean.half_width)
        rows.append(
            [
                row.label,
                format_percent(row.impact_weight) + "%",
                format_rating(row.own_mean.mean),
                "-" if row.competitor_mean is None else format_rating(row.competitor_mean.mean),
                "-" if row.relative is None else format_percent(row.relative),
            ]
        )
    if table.parent_relative is None:
        footer_relative = "-"
    elif table.is_root:
        footer_relative = f"CVA = {format_percent(table.parent_relative)}"
    else:
        footer_relative = format_percent(table.parent_relative)
    if table.parent_competitor is not None:
        half_widths.append(table.parent_competitor.half_width)
    footer = [
        table.parent_label,
        "",
        format_rating(table.parent_own.mean),
        "-" if table.parent_competitor is None else format_rating(table.parent_competitor.mean),
        footer_relative,
    ]
    r2_line = f"R^2 = {format_percent(round(table.r_squared * 100))}%"
    margin_line = (
        f"means are +/-{format_score(max(half_widths), 2)} or tighter (95% confidence)"
    )

    if fmt == "markdown":
        lines = [f"### {table.parent_label}", ""]
        lines += _markdown_table(headers, rows + [[f"**{footer[0]}**"] + footer[1:]])
        lines += ["", r2_line, margin_line]
        return "\n".join(lines) + "\n"

    # Render body and footer together so they share column widths, then
    # separate them with a rule.
    full = _text_table(headers, rows + [footer])
    lines = [table.parent_label, "=" * len(table.parent_label)]
    lines += full[:-1]
    lines.append("-" * len(full[1]))
    lines.append(full[-1])
    lines.append(r2_line)
    lines.append(margin_line)
    return "\n".join(lines) + "\n"


def render_priorities(ranking: PriorityRanking, fmt: str = "text") -> str:
    """Improvement priorities, best first: score = path slope x rating gap."""
    _check_format(fmt)
    headers = ["rank", "attribute", "score", "slope", "gap", "own", "competitors"]
    rows = []
    for rank, entry in enumerate(ranking, start=1):
        rows.append(
            [
                str(rank),
                entry.node,
                format_score(entry.score, 3),
                format_score(entry.path_slope, 3),
                format_rating(entry.gap),
                format_rating(entry.own_mean),
                format_rating(entry.competitor_mean),
            ]
        )
    title = "Improvement priorities"
    if fmt == "markdown":
        lines = [f"### {title}", ""]
        lines += _markdown_table(headers, rows, align_left=(1,))
    else:
        lines = [title, "=" * len(title)]
        lines += _text_table(headers, rows, align_left=(1,))
    if ranking.excluded:
        lines.append("")
        for node in sorted(ranking.excluded):
            lines.append(f"excluded: {node} ({ranking.excluded[node]})")
    return "\n".join(lines) + "\n"


def render_loyalty_curve(curve: LoyaltyCurve, fmt: str = "text") -> str:
    """The smoothed loyalty curve at each observed overall-value score."""
    _check_format(fmt)
    title = (
        f"Loyalty curve: share with {curve.outcome.value} >= {curve.threshold}"
    )
    headers = ["value score", "willing", "respondents"]
    rows = []
    for (score, proportion), count in zip(curve.points, curve.bin_counts):
        rows.append(
            [
                format_rating(score),
                format_score(100.0 * proportion, 1) + "%",
                str(count),
            ]
        )
    if fmt == "markdown":
        lines = [f"### {title}", ""]
        lines += _markdown_table(headers, rows, align_left=())
    else:
        lines = [title, "=" * len(title)]
        lines += _text_table(headers, rows, align_left=())
    return "\n".join(lines) + "\n"


def render_value_map(points: Sequence[ValueMapPoint], band: float, fmt: str = "text") -> str:
    """Suppliers positioned by relative quality vs relative price."""
    _check_format(fmt)
    title = "Value map"
    headers = ["supplier", "rel. quality", "rel. price", "zone"]
    rows = [
        [
            p.supplier,
            format_percent(p.relative_quality),
            format_percent(p.relative_price),
            p.zone,
        ]
        for p in points
    ]
    note = (
        f"fair-value band: quality + price within +/-{format_score(band, 1)} "
        "of the break-even line"
    )
    if fmt == "markdown":
        lines = [f"### {title}", ""]
        lines += _markdown_table(headers, rows)
        lines += ["", note]
    else:
        lines = [title, "=" * len(title)]
        lines += _text_table(headers, rows)
        lines += ["", note]
    return "\n".join(lines) + "\n"


def render_nps(result: NpsResult, fmt: str = "text") -> str:
    _check_format(fmt)
    title = "Net promoter score"
    headers = ["segment", "share"]
    rows = [
        ["promoters (9-10)", format_score(result.pct_promoters, 1) + "%"],
        ["passives (7-8)", format_score(result.pct_passives, 1) + "%"],
        ["detractors (0-6)", format_score(result.pct_detractors, 1) + "%"],
    ]
    score_line = f"NPS = {format_score(result.nps, 1)}   (n = {result.n})"
    if fmt == "markdown":
        lines = [f"### {title}", ""]
        lines += _markdown_table(headers, rows)
        lines += ["", score_line]
    else:
        lines = [title, "=" * len(title)]
        lines += _text_table(headers, rows)
        lines += ["", score_line]
    return "\n".join(lines) + "\n"


def render_nps_vs_cva(report: NpsVsCva, fmt: str = "text") -> str:
    """NPS next to CVA, with what each is based on and can be traced to."""
    _check_format(fmt)
    title = "NPS vs CVA"
    headers = ["measure", "value", "based on"]
    rows = [
        ["NPS", format_score(report.nps_result.nps, 1), report.nps_basis],
        ["CVA", format_percent(report.cva), report.cva_basis],
    ]
    drill = (
        "CVA decomposes into the fitted value tree ("
        + ", ".join(report.cva_drill_down)
        + "); NPS has no decomposition — the single question is its own basis."
    )
    if fmt == "markdown":
        lines = [f"### {title}", ""]
        lines += _markdown_table(headers, rows, align_left=(0, 2))
        lines += ["", drill]
    else:
        lines = [title, "=" * len(title)]
        lines += _text_table(headers, rows, align_left=(0, 2))
        lines += ["", drill]
    return "\n".join(lines) + "\n"


def loyalty_plot_rows(curve: LoyaltyCurve) -> list[tuple[str, str, str]]:
    """Rows for a loyalty-curve plot file: score, smoothed, raw proportion."""
    rows = []
    for (score, smoothed), raw in zip(curve.points, curve.raw_proportions):
        rows.append(
            (format_rating(score), format_score(smoothed, 4), format_score(raw, 4))
        )
    return rows


def write_loyalty_plot(curve: LoyaltyCurve, path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["value_score", "proportion_willing", "raw_proportion"])
    writer.writerows(loyalty_plot_rows(curve))
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")


def value_map_rows(points: Sequence[ValueMapPoint]) -> list[tuple[str, str, str, str]]:
    return [
        (p.supplier, format_percent(p.relative_quality), format_percent(p.relative_price), p.zone)
        for p in points
    ]


def write_value_map_plot(points: Sequence[ValueMapPoint], path: str | Path) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["supplier", "relative_quality", "relative_price", "zone"])
    writer.writerows(value_map_rows(points))
    Path(path).write_text(buffer.getvalue(), encoding="utf-8")
