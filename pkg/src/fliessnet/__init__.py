"""Exact algebra and analysis for additively interconnected series networks.

The package builds noncommutative generating series over the alphabet
{x0, ..., xm} with exact rational coefficients, composes them along network
interconnections, measures and predicts relative degrees, bounds coefficient
growth and finite escape times, and cross-checks everything numerically.
"""

__version__ = "0.1.0"

from .errors import (
    AlphabetError,
    ConditionError,
    DomainError,
    FliessnetError,
    ModelError,
    NoConvergence,
    NodeIndexError,
    ParseError,
    SubgraphBudgetError,
)
from .series import (
    Coeff,
    GrowthCheck,
    MaximalSeriesSpec,
    ScalarProduct,
    Series,
    as_coeff,
    check_growth,
    coeff_str,
    concat_product,
    linear_combine,
    maximal_series,
    scalar_product,
    series_from_json,
    series_to_json,
    shuffle_product,
)
from .words import (
    EMPTY_WORD,
    Word,
    all_words,
    format_word,
    graded_key,
    leading_zeros,
    parse_word,
    shuffle_words,
    words_of_length,
)
from .compose import compose, compose_at, compose_maximal, mixed_compose
from .network import (
    NetworkSpec,
    Subgraph,
    closed_loop_series,
    io_map,
    natural_response,
    network_from_json,
    network_to_json,
    restrict_to_subgraph,
    subgraph_extract,
)
from .reldeg import (
    AccumulatedDegrees,
    GenericityStats,
    PairReport,
    PredictionReport,
    RelDegReport,
    accumulated_degrees,
    complete_reldeg,
    genericity_sample,
    node_degree_report,
    predict_io_reldeg,
    relative_degree,
    sample_network,
    sum_reldeg_predict,
)
from .growth import (
    AbelSequence,
    GrowthBound,
    abel_taylor,
    closed_form_natural_response,
    lambert_w,
    lambert_w_lower,
    m_inf_bound,
)
from .sim import (
    Grid,
    Trajectory,
    ValidationReport,
    eval_fliess,
    simulate_maximal_ode,
    simulate_picard,
    validate_io_map,
)

__all__ = [
    "__version__",
    "AbelSequence",
    "AccumulatedDegrees",
    "AlphabetError",
    "Coeff",
    "ConditionError",
    "DomainError",
    "EMPTY_WORD",
    "FliessnetError",
    "GenericityStats",
    "Grid",
    "GrowthBound",
    "GrowthCheck",
    "MaximalSeriesSpec",
    "ModelError",
    "NetworkSpec",
    "NoConvergence",
    "NodeIndexError",
    "PairReport",
    "ParseError",
    "PredictionReport",
    "RelDegReport",
    "ScalarProduct",
    "Series",
    "Subgraph",
    "SubgraphBudgetError",
    "Trajectory",
    "ValidationReport",
    "Word",
    "abel_taylor",
    "accumulated_degrees",
    "all_words",
    "as_coeff",
    "check_growth",
    "closed_form_natural_response",
    "closed_loop_series",
    "coeff_str",
    "complete_reldeg",
    "compose",
    "compose_at",
    "compose_maximal",
    "concat_product",
    "eval_fliess",
    "format_word",
    "genericity_sample",
    "graded_key",
    "io_map",
    "lambert_w",
    "lambert_w_lower",
    "leading_zeros",
    "linear_combine",
    "m_inf_bound",
    "maximal_series",
    "mixed_compose",
    "natural_response",
    "network_from_json",
    "network_to_json",
    "node_degree_report",
    "parse_word",
    "predict_io_reldeg",
    "relative_degree",
    "restrict_to_subgraph",
    "sample_network",
    "scalar_product",
    "series_from_json",
    "series_to_json",
    "shuffle_product",
    "shuffle_words",
    "simulate_maximal_ode",
    "simulate_picard",
    "subgraph_extract",
    "sum_reldeg_predict",
    "validate_io_map",
    "words_of_length",
]
