"""Net promoter score: the standard bands, the arithmetic, and its limits.

The 0-10 "would you recommend us" answers are banded promoter (9-10),
passive (7-8), detractor (0-6); the score is %promoters - %detractors
(marketing material sometimes calls this a "ratio" — it is a difference of
percentages and is implemented as one).  Percentages are kept at full
precision internally; display rounds the score to one decimal.

Two deliberate design stances, both surfaced to callers:

* **No averaging across units.**  There is no agreed standard for aggregating
  NPS over business units, and the mean of per-unit scores is not the score
  of any population, so ``aggregate_nps`` refuses ``average_of_units`` with
  an explanatory error.  Pool the respondents instead.
* **NPS is coarse.**  Within a band every rating is interchangeable (a 0 and
  a 6 are the same detractor), and the score alone carries no drill-down; the
  comparison report puts it side by side with the customer-value score, which
  decomposes into per-driver profile tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import CvmError
from .regression import FittedHierarchy
from .survey import OutcomeKind, SurveySample

__all__ = [
    "NpsSegment",
    "NpsResult",
    "NpsAggregationError",
    "classify",
    "nps",
    "aggregate_nps",
    "NpsVsCva",
    "nps_vs_cva_report",
]

PROMOTER_MIN = 9
PASSIVE_MIN = 7


class NpsSegment(str, Enum):
    PROMOTER = "promoter"
    PASSIVE = "passive"
    DETRACTOR = "detractor"


class NpsAggregationError(CvmError):
    """Raised for aggregation methods the score does not support."""


@dataclass(frozen=True)
class NpsResult:
    """Score plus the full segment breakdown and rating histogram.

    ``nps`` is ``pct_promoters - pct_detractors`` at full precision;
    ``rating_histogram[r]`` counts answers of ``r`` for r in 0..10.
    """

    n: int
    pct_promoters: float
    pct_passives: float
    pct_detractors: float
    nps: float
    rating_histogram: tuple[int, ...]


def classify(rating: int) -> NpsSegment:
    """Band one 0-10 recommendation rating."""
    if not 0 <= rating <= 10:
        raise ValueError(f"rating must be in [0, 10], got {rating}")
    if rating >= PROMOTER_MIN:
        return NpsSegment.PROMOTER
    if rating >= PASSIVE_MIN:
        return NpsSegment.PASSIVE
    return NpsSegment.DETRACTOR


def nps(ratings: Sequence[int]) -> NpsResult:
    """Compute the score over one pooled set of 0-10 ratings."""
    if not ratings:
        raise ValueError("ratings is empty; the score is undefined")
    histogram = [0] * 11
    counts = {segment: 0 for segment in NpsSegment}
    for rating in ratings:
        segment = classify(rating)  # range-checks each rating
        counts[segment] += 1
        histogram[rating] += 1
    n = len(ratings)
    pct_promoters = 100.0 * counts[NpsSegment.PROMOTER] / n
    pct_passives = 100.0 * counts[NpsSegment.PASSIVE] / n
    pct_detractors = 100.0 * counts[NpsSegment.DETRACTOR] / n
    return NpsResult(
        n=n,
        pct_promoters=pct_promoters,
        pct_passives=pct_passives,
        pct_detractors=pct_detractors,
        nps=pct_promoters - pct_detractors,
        rating_histogram=tuple(histogram),
    )


def aggregate_nps(
    groups: Mapping[str, Sequence[int]] | Iterable[Sequence[int]],
    method: str = "pooled",
) -> NpsResult:
    """Combine rating sets from several units into one score.

    ``pooled`` concatenates the respondents and scores the union — the only
    aggregation with a population reading.  ``average_of_units`` is refused:
    there is no agreed standard for averaging the score across units, and the
    average of unit scores does not equal the score of any set of customers.
    """
    if method == "average_of_units":
        raise NpsAggregationError(
            "refusing to average per-unit scores: there is no agreed standard "
            "for aggregating the score across units, and a mean of unit scores "
            "is not the score of any customer population. Pool the respondents "
            "instead (method='pooled')."
        )
    if method != "pooled":
        raise NpsAggregationError(
            f"unknown aggregation method {method!r}; supported: 'pooled'"
        )
    if isinstance(groups, Mapping):
        sets: Iterable[Sequence[int]] = groups.values()
    else:
        sets = groups
    pooled: list[int] = []
    for ratings in sets:
        pooled.extend(ratings)
    return nps(pooled)


@dataclass(frozen=True)
class NpsVsCva:
    """The two headline metrics side by side, with their drill-down reach.

    The score tells you the temperature; the customer-value score comes with
    per-driver profile tables that tell you what to fix.
    """

    nps_result: NpsResult
    cva: int
    nps_basis: str
    cva_basis: str
    nps_drill_down: tuple[str, ...]
    cva_drill_down: tuple[str, ...]


def nps_vs_cva_report(
    own: SurveySample, hierarchy: FittedHierarchy, competitors: SurveySample
) -> NpsVsCva:
    """Score the own customers' recommend answers and line them up with CVA.

    ``own`` must actually contain own-supplier respondents with recommend
    outcomes; CVA additionally needs the competitor sample.
    """
    from .analytics import cva as compute_cva  # local import avoids a cycle

    own_respondents = [r for r in own.respondents if r.supplier == own.own_supplier]
    if not own_respondents:
        raise CvmError(
            "no own-supplier respondents in the sample; the score needs your "
            "own customers"
        )
    ratings = [
        r.outcome_ratings[OutcomeKind.RECOMMEND]
        for r in own_respondents
        if OutcomeKind.RECOMMEND in r.outcome_ratings
    ]
    if not ratings:
        raise CvmError("own respondents carry no recommend outcomes")
    result = nps(ratings)
    cva_value = compute_cva(hierarchy, own, competitors)
    return NpsVsCva(
        nps_result=result,
        cva=cva_value,
        nps_basis=f"own customers' recommend answers, n={result.n}",
        cva_basis="own vs competitor root-rating means",
        nps_drill_down=(),
        cva_drill_down=tuple(hierarchy.models),
    )
