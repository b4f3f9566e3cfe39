"""Survey samples: ingest, validation, export, splitting, and node means.

A survey row is one respondent: who they are (id, role, supplier whose
product they rated) plus a 1-10 rating for each value-tree node they answered
and 0-10 willingness outcomes (would recommend / would repurchase).  Ratings
may be missing per node; every present value is range-checked on ingest and
rejects name the offending file row.

The on-disk form is CSV with a fixed header prefix followed by one column per
tree node (canonical preorder) and the two outcome columns::

    respondent_id,role,supplier,<node ids...>,outcome_recommend,outcome_repurchase

A JSON-lines export mirrors the same schema one record per respondent for
machine consumption.  Ingest followed by export round-trips field-for-field.

Means come with a spreadsheet-style 95% half-width (1.96 * sd / sqrt(n)).
Survey *sourcing* — panel design, who counts as a decision maker, response
weighting — is out of scope; samples are taken as given.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .errors import CvmError
from .tree import ValueTree

__all__ = [
    "ROLES",
    "OutcomeKind",
    "Respondent",
    "SurveySample",
    "MeanWithHalfWidth",
    "SurveyFormatError",
    "NoRatingsError",
    "survey_columns",
    "ingest_responses",
    "survey_text",
    "write_survey",
    "survey_records",
    "sample_from_records",
    "write_survey_records",
    "read_survey_records",
    "split_by_supplier",
    "node_mean",
]

ROLES = ("decision_maker", "user")

#: multiplier for the normal-approximation 95% confidence half-width
CONFIDENCE_MULTIPLIER = 1.96

RATING_MIN, RATING_MAX = 1, 10
OUTCOME_MIN, OUTCOME_MAX = 0, 10


class OutcomeKind(str, Enum):
    """Willingness outcomes collected alongside the tree ratings."""

    RECOMMEND = "recommend"
    REPURCHASE = "repurchase"

    @property
    def column(self) -> str:
        return f"outcome_{self.value}"


class SurveyFormatError(CvmError):
    """Malformed survey data; carries the 1-based file row when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class NoRatingsError(CvmError):
    """No respondent carries the rating(s) a computation needs."""


@dataclass(frozen=True)
class Respondent:
    id: str
    role: str
    supplier: str
    node_ratings: Mapping[str, int]
    outcome_ratings: Mapping[OutcomeKind, int]


@dataclass(frozen=True)
class SurveySample:
    """An immutable batch of respondents tied to one value tree."""

    tree: ValueTree
    respondents: tuple[Respondent, ...]
    own_supplier: str

    def __len__(self) -> int:
        return len(self.respondents)

    @property
    def competitor_only(self) -> bool:
        """True when no respondent belongs to the own supplier."""
        return all(r.supplier != self.own_supplier for r in self.respondents)

    def suppliers(self) -> list[str]:
        """Distinct supplier labels in first-appearance order."""
        seen: dict[str, None] = {}
        for r in self.respondents:
            seen.setdefault(r.supplier, None)
        return list(seen)


@dataclass(frozen=True)
class MeanWithHalfWidth:
    """A mean plus its 95% half-width; ``n`` is the count behind it."""

    mean: float
    half_width: float
    n: int


def survey_columns(tree: ValueTree) -> list[str]:
    """The canonical CSV header for ``tree``."""
    return (
        ["respondent_id", "role", "supplier"]
        + list(tree.preorder())
        + [OutcomeKind.RECOMMEND.column, OutcomeKind.REPURCHASE.column]
    )


def _parse_int(token: str, lo: int, hi: int, what: str, row: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise SurveyFormatError(f"{what}: {token!r} is not an integer", row) from None
    if not lo <= value <= hi:
        raise SurveyFormatError(f"{what}: {value} outside [{lo}, {hi}]", row)
    return value


def ingest_responses(
    source: str | Path | IO[str], tree: ValueTree, own_supplier: str
) -> SurveySample:
    """Read a survey CSV into a validated :class:`SurveySample`.

    ``source`` is a path or an open text stream.  The header must start with
    ``respondent_id, role, supplier``; every further column must name a tree
    node or an outcome.  Node and outcome columns may be omitted (those
    ratings are then missing for everyone), but unknown names are an error —
    that is what catches a typo'd header.  Any bad cell aborts ingest with the
    offending row number; a header-only file yields an empty sample and a
    warning.
    """
    if hasattr(source, "read"):
        return _ingest_stream(source, tree, own_supplier)  # type: ignore[arg-type]
    with open(source, "r", encoding="utf-8", newline="") as handle:
        return _ingest_stream(handle, tree, own_supplier)


def _ingest_stream(stream: IO[str], tree: ValueTree, own_supplier: str) -> SurveySample:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SurveyFormatError("empty file: no header row") from None
    header = [h.strip() for h in header]

    fixed = ["respondent_id", "role", "supplier"]
    if header[: len(fixed)] != fixed:
        raise SurveyFormatError(
            f"header must start with {', '.join(fixed)}; got {header[:3]}", row=1
        )
    outcome_by_column = {kind.column: kind for kind in OutcomeKind}
    node_cols: dict[int, str] = {}
    outcome_cols: dict[int, OutcomeKind] = {}
    seen: set[str] = set()
    for idx, name in enumerate(header[len(fixed) :], start=len(fixed)):
        if name in seen:
            raise SurveyFormatError(f"duplicate column {name!r}", row=1)
        seen.add(name)
        if name in outcome_by_column:
            outcome_cols[idx] = outcome_by_column[name]
        elif name in tree.nodes:
            node_cols[idx] = name
        else:
            raise SurveyFormatError(
                f"unknown column {name!r}: not a node of tree {tree.name!r} "
                "and not an outcome column",
                row=1,
            )

    respondents: list[Respondent] = []
    for row_number, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise SurveyFormatError(
                f"expected {len(header)} fields, got {len(row)}", row_number
            )
        respondent_id = row[0].strip()
        role = row[1].strip()
        supplier = row[2].strip()
        if not respondent_id:
            raise SurveyFormatError("empty respondent_id", row_number)
        if role not in ROLES:
            raise SurveyFormatError(
                f"unknown role {role!r} (expected one of {', '.join(ROLES)})", row_number
            )
        if not supplier:
            raise SurveyFormatError("empty supplier", row_number)
        node_ratings: dict[str, int] = {}
        for idx, node_id in node_cols.items():
            token = row[idx].strip()
            if token:
                node_ratings[node_id] = _parse_int(
                    token, RATING_MIN, RATING_MAX, f"rating for {node_id!r}", row_number
                )
        outcome_ratings: dict[OutcomeKind, int] = {}
        for idx, kind in outcome_cols.items():
            token = row[idx].strip()
            if token:
                outcome_ratings[kind] = _parse_int(
                    token, OUTCOME_MIN, OUTCOME_MAX, f"{kind.column}", row_number
                )
        respondents.append(
            Respondent(respondent_id, role, supplier, node_ratings, outcome_ratings)
        )

    if not respondents:
        warnings.warn("survey has a header but no respondent rows", stacklevel=3)
    return SurveySample(tree=tree, respondents=tuple(respondents), own_supplier=own_supplier)


def survey_text(sample: SurveySample) -> str:
    """Canonical CSV text for ``sample`` (the exact ingest round-trip form)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = survey_columns(sample.tree)
    writer.writerow(columns)
    node_order = list(sample.tree.preorder())
    for r in sample.respondents:
        row = [r.id, r.role, r.supplier]
        row += [str(r.node_ratings[n]) if n in r.node_ratings else "" for n in node_order]
        for kind in (OutcomeKind.RECOMMEND, OutcomeKind.REPURCHASE):
            row.append(str(r.outcome_ratings[kind]) if kind in r.outcome_ratings else "")
        writer.writerow(row)
    return buffer.getvalue()


def write_survey(sample: SurveySample, path: str | Path) -> None:
    Path(path).write_text(survey_text(sample), encoding="utf-8")


def survey_records(sample: SurveySample) -> list[dict]:
    """One plain dict per respondent, mirroring the CSV schema."""
    return [
        {
            "respondent_id": r.id,
            "role": r.role,
            "supplier": r.supplier,
            "node_ratings": dict(r.node_ratings),
            "outcome_ratings": {k.value: v for k, v in r.outcome_ratings.items()},
        }
        for r in sample.respondents
    ]


def sample_from_records(
    records: Iterable[Mapping], tree: ValueTree, own_supplier: str
) -> SurveySample:
    """Inverse of :func:`survey_records` (validates like CSV ingest)."""
    respondents = []
    for number, rec in enumerate(records, start=1):
        role = rec["role"]
        if role not in ROLES:
            raise SurveyFormatError(f"unknown role {role!r}", number)
        node_ratings: dict[str, int] = {}
        for node_id, value in rec.get("node_ratings", {}).items():
            if node_id not in tree.nodes:
                raise SurveyFormatError(f"unknown node {node_id!r}", number)
            node_ratings[node_id] = _parse_int(
                str(value), RATING_MIN, RATING_MAX, f"rating for {node_id!r}", number
            )
        outcome_ratings: dict[OutcomeKind, int] = {}
        for kind_value, value in rec.get("outcome_ratings", {}).items():
            kind = OutcomeKind(kind_value)
            outcome_ratings[kind] = _parse_int(
                str(value), OUTCOME_MIN, OUTCOME_MAX, kind.column, number
            )
        respondents.append(
            Respondent(
                str(rec["respondent_id"]),
                role,
                str(rec["supplier"]),
                node_ratings,
                outcome_ratings,
            )
        )
    return SurveySample(tree=tree, respondents=tuple(respondents), own_supplier=own_supplier)


def write_survey_records(sample: SurveySample, path: str | Path) -> None:
    """JSON-lines export: one respondent record per line."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in survey_records(sample):
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")


def read_survey_records(
    path: str | Path, tree: ValueTree, own_supplier: str
) -> SurveySample:
    with open(path, "r", encoding="utf-8") as handle:
        records = [json.loads(line) for line in handle if line.strip()]
    return sample_from_records(records, tree, own_supplier)


def split_by_supplier(sample: SurveySample) -> tuple[SurveySample, SurveySample]:
    """(own-supplier respondents, everyone else), both keeping the tree/label."""
    own = tuple(r for r in sample.respondents if r.supplier == sample.own_supplier)
    rest = tuple(r for r in sample.respondents if r.supplier != sample.own_supplier)
    return (
        SurveySample(sample.tree, own, sample.own_supplier),
        SurveySample(sample.tree, rest, sample.own_supplier),
    )


def node_mean(sample: SurveySample, node_id: str) -> MeanWithHalfWidth:
    """Mean rating for one node over the respondents who rated it.

    Half-width is ``1.96 * sd / sqrt(n)`` with the sample (n-1) standard
    deviation; a single rating or a constant column gives half-width 0.
    Raises :class:`NoRatingsError` when nobody rated the node.
    """
    sample.tree.node(node_id)  # raises UnknownNodeError for foreign ids
    values = [r.node_ratings[node_id] for r in sample.respondents if node_id in r.node_ratings]
    if not values:
        raise NoRatingsError(f"no ratings for node {node_id!r}")
    data = np.asarray(values, dtype=np.float64)
    mean = float(data.mean())
    if len(values) < 2:
        half = 0.0
    else:
        sd = float(data.std(ddof=1))
        half = CONFIDENCE_MULTIPLIER * sd / float(np.sqrt(len(values)))
    return MeanWithHalfWidth(mean=mean, half_width=half, n=len(values))
