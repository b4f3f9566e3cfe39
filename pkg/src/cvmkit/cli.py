"""Command-line interface: validate, fit, report, nps, simulate.

Every command is deterministic given its inputs and flags: artifacts carry
no timestamps (those go to a ``<out>.log`` sidecar), files are written
atomically (write-then-rename), and all number formatting goes through the
package's single rounding policy.  Exit status is 0 exactly when no
error-class diagnostic was emitted; errors print to stderr with file/row
context where available.

A JSON config file may supply defaults for any flag of any subcommand::

    cvmkit --config run.json report --format records

The file maps either subcommand names to flag dicts, or flag names directly
(applied to every subcommand); explicit flags win.
"""

from __future__ import annotations

import datetime
import io
import json
import os
import sys
from pathlib import Path

import click

from .analytics import (
    loyalty_curve,
    profile_table,
    rank_priorities,
    relative_rating,
    value_map,
    value_target_for_loyalty,
)
from .errors import CvmError
from .nps import aggregate_nps, nps, nps_vs_cva_report
from .regression import fit_hierarchy, hierarchy_records, load_hierarchy
from .rendering import (
    loyalty_plot_rows,
    render_loyalty_curve,
    render_nps,
    render_nps_vs_cva,
    render_priorities,
    render_profile_table,
    render_value_map,
    value_map_rows,
)
from .rounding import format_percent, format_rating, format_score
from .simulate import generate_market, load_truth
from .survey import (
    NoRatingsError,
    OutcomeKind,
    ingest_responses,
    split_by_supplier,
    survey_text,
)
from .tree import parse_tree_spec, validate_tree

_SUBCOMMANDS = ("validate", "fit", "report", "nps", "simulate")


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _warn(message: str) -> None:
    click.echo(f"warning: {message}", err=True)


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        _fail(f"{what} file not found: {path}")
    return p


def _write_atomic(path: str | Path, text: str) -> None:
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, target)


def _write_sidecar(out_path: str | Path, command: str) -> None:
    """Run metadata lives next to the artifact, never inside it."""
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    line = f"{stamp} cvmkit {command} -> {out_path}\n"
    _write_atomic(str(out_path) + ".log", line)


def _emit(text: str, out_path: str | None, command: str) -> None:
    if out_path is None:
        click.echo(text, nl=False)
    else:
        _write_atomic(out_path, text)
        _write_sidecar(out_path, command)


def _load_tree(path: str):
    return parse_tree_spec(_require_file(path, "tree").read_text(encoding="utf-8"))


def _load_sample(survey_path: str, tree, own: str):
    _require_file(survey_path, "survey")
    return ingest_responses(survey_path, tree, own)


def _flag_aliases(command: click.Command) -> dict[str, str]:
    """Accepted config keys (flag or parameter spelling) -> parameter name."""
    aliases: dict[str, str] = {}
    for param in command.params:
        aliases[param.name] = param.name
        for opt in param.opts:
            if opt.startswith("--"):
                aliases[opt[2:].replace("-", "_")] = param.name
    return aliases


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--config",
    "config_path",
    default=None,
    metavar="FILE",
    help="JSON file supplying default values for subcommand flags.",
)
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Customer-value analytics: value trees, driver models, competitive reports."""
    if config_path is None:
        return
    path = _require_file(config_path, "config")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        _fail(f"config is not valid JSON: {exc}")
    if not isinstance(data, dict):
        _fail("config must be a JSON object")
    if data and set(data) <= set(_SUBCOMMANDS) and all(
        isinstance(v, dict) for v in data.values()
    ):
        sections = {name: dict(values) for name, values in data.items()}
    else:
        sections = {name: dict(data) for name in _SUBCOMMANDS}
    default_map: dict[str, dict] = {}
    for name, values in sections.items():
        aliases = _flag_aliases(main.commands[name])
        # keys that fit the subcommand become its defaults; a flat config's
        # other keys simply belong to other subcommands
        default_map[name] = {
            aliases[key.replace("-", "_")]: value
            for key, value in values.items()
            if key.replace("-", "_") in aliases
        }
    ctx.default_map = default_map


@main.command()
@click.option("--tree", "tree_path", required=True, metavar="FILE")
@click.option("--survey", "survey_path", default=None, metavar="FILE")
@click.option("--own", "own_label", default=None, metavar="LABEL")
def validate(tree_path: str, survey_path: str | None, own_label: str | None) -> None:
    """Check a tree file (and optionally a survey against it)."""
    try:
        path = _require_file(tree_path, "tree")
        tree = parse_tree_spec(path.read_text(encoding="utf-8"))
        violations = validate_tree(tree)  # parser already rejects invalid trees
        for violation in violations:
            click.echo(f"error: {violation.rule}: {violation.message}", err=True)
        click.echo(
            f"tree ok: {len(tree.nodes)} nodes, "
            f"{len(tree.internal_nodes())} internal, {len(tree.leaves())} leaves"
        )
        if survey_path is not None:
            sample = _load_sample(survey_path, tree, own_label or "")
            click.echo(
                f"survey ok: {len(sample)} respondents, "
                f"suppliers: {', '.join(sample.suppliers())}"
            )
        if violations:
            sys.exit(1)
    except CvmError as exc:
        _fail(str(exc))


def _fit_summary(hierarchy) -> str:
    lines = []
    for node_id, model in hierarchy.models.items():
        weights = ", ".join(
            f"{child}={format_percent(weight)}%"
            for child, weight in model.impact_weights.items()
        )
        lines.append(
            f"{node_id}: R^2 = {format_percent(round(model.fit.r_squared * 100))}%, "
            f"n = {model.fit.n}, weights: {weights}"
        )
        for flag in model.flags:
            lines.append(f"  note: {flag}")
    for node_id, reason in hierarchy.unfit.items():
        lines.append(f"{node_id}: not fitted ({reason})")
    return "\n".join(lines) + "\n"


@main.command()
@click.option("--tree", "tree_path", required=True, metavar="FILE")
@click.option("--survey", "survey_path", required=True, metavar="FILE")
@click.option("--own", "own_label", required=True, metavar="LABEL")
@click.option("--out", "out_path", default=None, metavar="FILE",
              help="write the fitted-hierarchy document (JSON) here")
def fit(tree_path: str, survey_path: str, own_label: str, out_path: str | None) -> None:
    """Fit the per-node driver models and print a fit summary."""
    try:
        tree = _load_tree(tree_path)
        sample = _load_sample(survey_path, tree, own_label)
        hierarchy = fit_hierarchy(sample, tree)
        if not hierarchy.models:
            _fail("no node could be fitted: " + "; ".join(
                f"{node} ({reason})" for node, reason in hierarchy.unfit.items()
            ))
        if out_path is not None:
            document = json.dumps(hierarchy_records(hierarchy), indent=2) + "\n"
            _write_atomic(out_path, document)
            _write_sidecar(out_path, "fit")
        click.echo(_fit_summary(hierarchy), nl=False)
    except CvmError as exc:
        _fail(str(exc))


def _table_records(table) -> dict:
    def mean_records(m):
        return None if m is None else {
            "mean": m.mean, "half_width": m.half_width, "n": m.n
        }

    return {
        "parent": table.parent,
        "label": table.parent_label,
        "is_root": table.is_root,
        "r_squared": table.r_squared,
        "parent_own": mean_records(table.parent_own),
        "parent_competitor": mean_records(table.parent_competitor),
        "parent_relative": table.parent_relative,
        "rows": [
            {
                "node": row.node,
                "label": row.label,
                "impact_weight": row.impact_weight,
                "own": mean_records(row.own_mean),
                "competitor": mean_records(row.competitor_mean),
                "relative": row.relative,
            }
            for row in table.rows
        ],
    }


def _supplier_value_points(sample, tree) -> list[tuple[str, float, float]]:
    """Each supplier's (relative quality, relative price) versus the rest.

    Uses the root's two driver children as the map axes; trees with a
    different top-level shape have no canonical quality/price split, so the
    caller skips the map.
    """
    quality_node, price_node = tree.children_of(tree.root)
    points = []
    for supplier in sample.suppliers():
        mine = [r for r in sample.respondents if r.supplier == supplier]
        rest = [r for r in sample.respondents if r.supplier != supplier]
        if not rest:
            continue

        def mean_of(respondents, node):
            values = [r.node_ratings[node] for r in respondents if node in r.node_ratings]
            if not values:
                raise NoRatingsError(f"no ratings for {node!r}")
            return sum(values) / len(values)

        points.append(
            (
                supplier,
                float(relative_rating(mean_of(mine, quality_node), mean_of(rest, quality_node))),
                float(relative_rating(mean_of(mine, price_node), mean_of(rest, price_node))),
            )
        )
    return points


@main.command()
@click.option("--tree", "tree_path", required=True, metavar="FILE")
@click.option("--survey", "survey_path", required=True, metavar="FILE")
@click.option("--own", "own_label", required=True, metavar="LABEL")
@click.option("--hierarchy", "hierarchy_path", default=None, metavar="FILE",
              help="reuse a saved fit instead of refitting")
@click.option("--loyalty-threshold", default=8, show_default=True,
              help="outcome rating that counts as 'very willing'")
@click.option("--target-loyalty", default=None, type=float,
              help="also report the value score this willing-share requires")
@click.option("--band", default=3.0, show_default=True,
              help="half-width of the fair-value band on the value map")
@click.option("--outcome", default="recommend", show_default=True,
              type=click.Choice(["recommend", "repurchase"]),
              help="which outcome question drives the loyalty curve")
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "records", "plotdata"]))
@click.option("--out", "out_path", default=None, metavar="PATH",
              help="output file (text/records) or file stem (plotdata)")
def report(
    tree_path: str,
    survey_path: str,
    own_label: str,
    hierarchy_path: str | None,
    loyalty_threshold: int,
    target_loyalty: float | None,
    band: float,
    outcome: str,
    fmt: str,
    out_path: str | None,
) -> None:
    """The full competitive report: profile tables, CVA, priorities, loyalty, value map."""
    try:
        tree = _load_tree(tree_path)
        sample = _load_sample(survey_path, tree, own_label)
        own_sample, competitor_sample = split_by_supplier(sample)
        if len(own_sample.respondents) == 0:
            _fail(f"no respondents with supplier {own_label!r} in {survey_path}")
        if len(competitor_sample.respondents) == 0:
            _warn("no competitor respondents; relative columns unavailable")
        if hierarchy_path is not None:
            hierarchy = load_hierarchy(_require_file(hierarchy_path, "hierarchy"), tree)
        else:
            hierarchy = fit_hierarchy(sample, tree)
        for node_id, reason in hierarchy.unfit.items():
            _warn(f"no model for {node_id}: {reason}")

        tables = [
            profile_table(hierarchy, own_sample, competitor_sample, node_id)
            for node_id in tree.internal_nodes()
            if node_id in hierarchy.models
        ]
        ranking = rank_priorities(hierarchy, own_sample, competitor_sample)

        curve = None
        outcome_kind = OutcomeKind(outcome)
        try:
            curve = loyalty_curve(own_sample, outcome_kind, loyalty_threshold)
        except (NoRatingsError, ValueError) as exc:
            _warn(f"loyalty curve unavailable: {exc}")

        target_line = None
        if target_loyalty is not None and curve is not None:
            required = value_target_for_loyalty(curve, target_loyalty)
            pct = format_score(100.0 * target_loyalty, 1)
            if required is None:
                target_line = (
                    f"required value score for {pct}% willingness: "
                    "beyond the observed curve"
                )
            else:
                target_line = (
                    f"required value score for {pct}% willingness: "
                    f"{format_rating(required)}"
                )

        map_points = []
        if len(tree.children_of(tree.root)) == 2 and len(sample.suppliers()) > 1:
            try:
                map_points = value_map(_supplier_value_points(sample, tree), band)
            except (NoRatingsError, CvmError) as exc:
                _warn(f"value map unavailable: {exc}")
        elif len(tree.children_of(tree.root)) != 2:
            _warn("value map needs a two-driver root (quality/price); skipped")

        if fmt == "plotdata":
            if out_path is None:
                _fail("--format plotdata needs --out STEM to name its files")
            if curve is not None:
                buffer = io.StringIO()
                buffer.write("value_score,proportion_willing,raw_proportion\n")
                for row in loyalty_plot_rows(curve):
                    buffer.write(",".join(row) + "\n")
                _write_atomic(f"{out_path}_loyalty_curve.csv", buffer.getvalue())
                _write_sidecar(f"{out_path}_loyalty_curve.csv", "report")
            if map_points:
                buffer = io.StringIO()
                buffer.write("supplier,relative_quality,relative_price,zone\n")
                for row in value_map_rows(map_points):
                    buffer.write(",".join(row) + "\n")
                _write_atomic(f"{out_path}_value_map.csv", buffer.getvalue())
                _write_sidecar(f"{out_path}_value_map.csv", "report")
            return

        if fmt == "records":
            document = {
                "own_supplier": own_label,
                "n_respondents": len(sample),
                "tables": [_table_records(t) for t in tables],
                "cva": next((t.parent_relative for t in tables if t.is_root), None),
                "priorities": [
                    {
                        "node": e.node,
                        "score": e.score,
                        "path_slope": e.path_slope,
                        "gap": e.gap,
                        "own_mean": e.own_mean,
                        "competitor_mean": e.competitor_mean,
                    }
                    for e in ranking
                ],
                "priorities_excluded": dict(sorted(ranking.excluded.items())),
                "loyalty_curve": None if curve is None else {
                    "outcome": curve.outcome.value,
                    "threshold": curve.threshold,
                    "points": [list(p) for p in curve.points],
                    "raw_proportions": list(curve.raw_proportions),
                    "bin_counts": list(curve.bin_counts),
                },
                "loyalty_target": None if target_loyalty is None or curve is None else {
                    "target": target_loyalty,
                    "required_value_score": value_target_for_loyalty(curve, target_loyalty),
                },
                "value_map": [
                    {
                        "supplier": p.supplier,
                        "relative_quality": p.relative_quality,
                        "relative_price": p.relative_price,
                        "zone": p.zone,
                    }
                    for p in map_points
                ],
            }
            _emit(json.dumps(document, indent=2) + "\n", out_path, "report")
            return

        sections = [render_profile_table(t) for t in tables]
        sections.append(render_priorities(ranking))
        if curve is not None:
            loyalty_section = render_loyalty_curve(curve)
            if target_line is not None:
                loyalty_section += target_line + "\n"
            sections.append(loyalty_section)
        if map_points:
            sections.append(render_value_map(map_points, band))
        _emit("\n".join(sections), out_path, "report")
    except CvmError as exc:
        _fail(str(exc))


@main.command("nps")
@click.option("--tree", "tree_path", required=True, metavar="FILE")
@click.option("--survey", "survey_path", required=True, metavar="FILE")
@click.option("--own", "own_label", required=True, metavar="LABEL")
@click.option("--aggregate", "aggregate_method", default="pooled", show_default=True,
              type=click.Choice(["pooled", "average-of-units"]),
              help="how to combine respondents across suppliers-as-units")
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "records"]))
@click.option("--out", "out_path", default=None, metavar="FILE")
def nps_command(
    tree_path: str,
    survey_path: str,
    own_label: str,
    aggregate_method: str,
    fmt: str,
    out_path: str | None,
) -> None:
    """Net promoter score for the own supplier, next to CVA when computable."""
    try:
        tree = _load_tree(tree_path)
        sample = _load_sample(survey_path, tree, own_label)
        own_sample, competitor_sample = split_by_supplier(sample)

        recommend = OutcomeKind.RECOMMEND

        def ratings_of(respondents) -> list[int]:
            return [
                r.outcome_ratings[recommend]
                for r in respondents
                if recommend in r.outcome_ratings
            ]

        if aggregate_method == "average-of-units":
            groups = {
                supplier: ratings_of(
                    [r for r in sample.respondents if r.supplier == supplier]
                )
                for supplier in sample.suppliers()
            }
            aggregate_nps(groups, method="average_of_units")  # refuses; see below
            raise AssertionError("unreachable")  # pragma: no cover

        own_ratings = ratings_of(own_sample.respondents)
        if not own_ratings:
            _fail(f"no recommend outcomes for supplier {own_label!r}")
        result = nps(own_ratings)

        comparison = None
        if len(competitor_sample.respondents) > 0:
            hierarchy = fit_hierarchy(sample, tree)
            if tree.root in hierarchy.models:
                comparison = nps_vs_cva_report(own_sample, hierarchy, competitor_sample)
            else:
                _warn(
                    "CVA comparison unavailable: "
                    + hierarchy.unfit.get(tree.root, "root model missing")
                )
        else:
            _warn("CVA comparison unavailable: no competitor respondents")

        if fmt == "records":
            document = {
                "own_supplier": own_label,
                "nps": {
                    "n": result.n,
                    "pct_promoters": result.pct_promoters,
                    "pct_passives": result.pct_passives,
                    "pct_detractors": result.pct_detractors,
                    "score": result.nps,
                    "rating_histogram": list(result.rating_histogram),
                },
                "cva": None if comparison is None else comparison.cva,
            }
            _emit(json.dumps(document, indent=2) + "\n", out_path, "nps")
            return

        text = render_nps(result)
        if comparison is not None:
            text += "\n" + render_nps_vs_cva(comparison)
        _emit(text, out_path, "nps")
    except CvmError as exc:
        _fail(str(exc))


@main.command()
@click.option("--seed-config", "config_path", required=True, metavar="FILE",
              help="ground-truth document (see the market simulator docs)")
@click.option("--out", "out_path", required=True, metavar="FILE",
              help="survey file to write")
def simulate(config_path: str, out_path: str) -> None:
    """Generate a survey sample from a ground-truth config, deterministically."""
    try:
        truth = load_truth(_require_file(config_path, "seed-config"))
        sample = generate_market(truth)
        _write_atomic(out_path, survey_text(sample))
        _write_sidecar(out_path, "simulate")
        if len(sample) == 0:
            _warn("n = 0: wrote a header-only survey file")
            return
        root = truth.tree.root
        lines = [f"wrote {len(sample)} respondents to {out_path}"]
        for supplier in truth.n_per_supplier:
            ratings = [
                r.node_ratings[root]
                for r in sample.respondents
                if r.supplier == supplier and root in r.node_ratings
            ]
            if ratings:
                lines.append(
                    f"  {supplier}: n = {len(ratings)}, "
                    f"mean {root} = {format_rating(sum(ratings) / len(ratings))}"
                )
        click.echo("\n".join(lines))
    except CvmError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
