"""Reflection via sample splitting (RESS) for FDR control in large-scale t-tests."""

from .core import (
    GroupSummary,
    SplitPlan,
    TStatBundle,
    column_summary,
    normal_cdf,
    split_even,
    t_one_sample,
    t_two_sample,
)
from .engine import (
    PowerBounds,
    ThresholdResult,
    Variant,
    WStats,
    compute_w,
    fdp_hat_curve,
    power_bounds,
    ress,
    theta,
    threshold_one_sided,
    threshold_plus,
    threshold_raw,
    threshold_refined,
)
from .errors import (
    ConfigError,
    DataError,
    DegenerateSampleError,
    ParameterError,
    ParseError,
    RessError,
    ZeroVarianceError,
)

__version__ = "0.1.0"
