"""Extreme-value estimation of monotone production frontiers."""

from .core import (
    Dataset,
    Observation,
    TransformedSample,
    conditional_cdf,
    conditional_quantile,
    dominates,
    empirical_fx,
    fdh,
    input_quantile_grid,
    order_stat_quantile,
    transform,
)
from .csvio import load_csv, parse_csv, parse_csv_text, write_dataset
from .errors import (
    ConfigError,
    CsvParseError,
    DimensionMismatch,
    EmptyConditioningSet,
    FrontierError,
    InsufficientStableRange,
    InvalidParameter,
    NonpositiveThresholdValue,
    ThresholdOutOfRange,
)
from .estimators import (
    FrontierEstimate,
    extreme_quantile_ci_moment,
    extreme_quantile_ci_pickands,
    fdh_estimate,
    known_ell_ci,
    known_rho_star,
    moment_endpoint,
    pickands_star,
    robust_frontier,
    two_step_known_rho,
    v1,
    v2,
    v3,
    v4,
    v5,
)
from .kn_select import KSelection, select_k_frontier, select_k_moment_rho, select_k_pickands_rho
from .mc import (
    EstimatorSpec,
    ExperimentConfig,
    ExperimentReport,
    KPolicy,
    emit_report_table,
    fdh_moment_oracle,
    run_experiment,
)
from .simgen import Scenario, gen_cobb_douglas, gen_uniform_triangle, ground_truth, inject_outlier
from .tail_index import (
    Interval,
    MomentSums,
    TailIndexEstimate,
    moment_rho,
    moment_sums,
    moment_variance,
    pickands_plot,
    pickands_rho,
    pickands_variance,
    rho_confidence_interval,
)

__version__ = "0.1.0"
