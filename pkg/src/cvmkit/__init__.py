"""Customer-value analytics on tree-structured survey ratings.

The package covers the full workflow of competitive customer-value
management: define a value tree (worth-what-paid-for at the root, quality
and price drivers, rated leaf attributes), ingest 1-10 survey ratings, fit
one small linear driver model per internal node, and read the results as
competitive profile tables (impact weights, relative ratings, an overall
CVA score), improvement priorities, loyalty curves, value maps, and NPS.
A seeded market simulator with known planted parameters backs all of it
with testable ground truth.

Typical use::

    import cvmkit

    tree = cvmkit.datasets.automobile_tree()
    sample = cvmkit.datasets.market_survey()
    own, competitors = cvmkit.split_by_supplier(sample)
    hierarchy = cvmkit.fit_hierarchy(sample, tree)
    table = cvmkit.profile_table(hierarchy, own, competitors, tree.root)
    print(cvmkit.render_profile_table(table))
"""

from . import datasets
from .analytics import (
    VALUE_ZONES,
    LoyaltyCurve,
    MissingModelError,
    PriorityEntry,
    PriorityRanking,
    ProfileRow,
    ProfileTable,
    ValueMapPoint,
    cva,
    loyalty_curve,
    pool_adjacent_violators,
    profile_table,
    rank_priorities,
    relative_rating,
    retention_projection,
    top_box_rate,
    value_map,
    value_target_for_loyalty,
    what_if,
)
from .errors import CvmError
from .nps import (
    NpsAggregationError,
    NpsResult,
    NpsSegment,
    NpsVsCva,
    aggregate_nps,
    classify,
    nps,
    nps_vs_cva_report,
)
from .regression import (
    FittedHierarchy,
    InsufficientDataError,
    LinearFit,
    NodeModel,
    SingularMatrixError,
    UnfitNodeError,
    fit_hierarchy,
    fit_linear,
    fit_node_model,
    hierarchy_from_records,
    hierarchy_records,
    load_hierarchy,
    save_hierarchy,
)
from .rendering import (
    render_loyalty_curve,
    render_nps,
    render_nps_vs_cva,
    render_priorities,
    render_profile_table,
    render_value_map,
    write_loyalty_plot,
    write_value_map_plot,
)
from .rng import RandomStream
from .rounding import format_percent, format_rating, format_score, round_half_away
from .simulate import (
    COMPETITOR_CLASS,
    CalibrationError,
    CellTarget,
    GroundTruth,
    InconsistentTargetsError,
    NodeTarget,
    TableTargets,
    calibrate_to_tables,
    canonical_targets,
    generate_market,
    load_truth,
    save_truth,
)
from .survey import (
    MeanWithHalfWidth,
    NoRatingsError,
    OutcomeKind,
    Respondent,
    SurveyFormatError,
    SurveySample,
    ingest_responses,
    node_mean,
    split_by_supplier,
    survey_columns,
    survey_text,
    write_survey,
)
from .tree import (
    TreeFormatError,
    TreeNode,
    UnknownNodeError,
    ValueTree,
    Violation,
    parse_tree_spec,
    path_to_root,
    serialize_tree,
    validate_tree,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "datasets",
    # errors
    "CvmError",
    "TreeFormatError",
    "UnknownNodeError",
    "SurveyFormatError",
    "NoRatingsError",
    "SingularMatrixError",
    "InsufficientDataError",
    "UnfitNodeError",
    "MissingModelError",
    "NpsAggregationError",
    "InconsistentTargetsError",
    "CalibrationError",
    # trees
    "TreeNode",
    "ValueTree",
    "Violation",
    "parse_tree_spec",
    "serialize_tree",
    "validate_tree",
    "path_to_root",
    # surveys
    "OutcomeKind",
    "Respondent",
    "SurveySample",
    "MeanWithHalfWidth",
    "ingest_responses",
    "survey_columns",
    "survey_text",
    "write_survey",
    "split_by_supplier",
    "node_mean",
    # regression
    "LinearFit",
    "NodeModel",
    "FittedHierarchy",
    "fit_linear",
    "fit_node_model",
    "fit_hierarchy",
    "hierarchy_records",
    "hierarchy_from_records",
    "save_hierarchy",
    "load_hierarchy",
    # analytics
    "relative_rating",
    "ProfileRow",
    "ProfileTable",
    "profile_table",
    "cva",
    "what_if",
    "PriorityEntry",
    "PriorityRanking",
    "rank_priorities",
    "pool_adjacent_violators",
    "LoyaltyCurve",
    "loyalty_curve",
    "value_target_for_loyalty",
    "VALUE_ZONES",
    "ValueMapPoint",
    "value_map",
    "retention_projection",
    "top_box_rate",
    # nps
    "NpsSegment",
    "NpsResult",
    "classify",
    "nps",
    "aggregate_nps",
    "NpsVsCva",
    "nps_vs_cva_report",
    # simulation
    "COMPETITOR_CLASS",
    "GroundTruth",
    "generate_market",
    "save_truth",
    "load_truth",
    "CellTarget",
    "NodeTarget",
    "TableTargets",
    "calibrate_to_tables",
    "canonical_targets",
    # rendering
    "render_profile_table",
    "render_priorities",
    "render_loyalty_curve",
    "render_value_map",
    "render_nps",
    "render_nps_vs_cva",
    "write_loyalty_plot",
    "write_value_map_plot",
    # numbers
    "round_half_away",
    "format_rating",
    "format_percent",
    "format_score",
    "RandomStream",
]
