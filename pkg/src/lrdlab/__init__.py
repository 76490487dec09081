"""lrdlab: measure long-range dependence in index return series and score
synthetic-path generators against the same battery."""

from .arfima_figarch import (
    ArfimaFigarchParams,
    FitResult,
    FracDiffKernel,
    figarch_weights,
    fit,
    fracdiff_weights,
    hurst_from_d,
    loglik,
    simulate,
)
from .dfa import block_fluctuation, dfa_analysis, profile
from .diagnostics import MomentReport, moments
from .ensemble import (
    EvaluationReport,
    PathEnsemble,
    evaluate,
    load_ensemble,
    save_ensemble,
    select_nearest,
)
from .rescaled_range import rs_analysis, rs_statistic
from .scalefit import (
    HurstEstimate,
    HurstMethod,
    ScaleFit,
    ScaleSchedule,
    fit_loglog,
    infer_hurst,
    make_schedule,
)
from .series import Frequency, PriceSeries, ReturnSeries, downsample, load_prices, log_returns

__version__ = "0.1.0"
