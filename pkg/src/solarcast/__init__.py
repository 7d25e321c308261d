"""Daily solar irradiation forecasting.

Seasonal preprocessing (clearness index + moving-average-ratio factors),
a Levenberg-Marquardt-trained perceptron, six classical baselines, and a
verification harness, wired together by a file-mediated CLI pipeline.
"""

from ._accel import NUMBA_ENABLED, backend_name
from .baselines import (
    ArmaModel,
    ArModel,
    BayesClassifierModel,
    Discretizer,
    KnnConfig,
    KnnModel,
    LinearModel,
    MarkovChainModel,
    NaiveModel,
    fit_ar,
    fit_arma,
    fit_bayes,
    fit_discretizer,
    fit_markov,
    knn_predict,
    naive_predict,
    predict_bayes,
    predict_linear,
    predict_markov,
)
from .errors import ConfigError, DataError, NumericalError, SolarcastError
from .evaluation import (
    CiSummary,
    ForecastRun,
    MetricsReport,
    compare_models,
    confidence_interval,
    metrics,
    monthly_aggregate_error,
    seasonal_breakdown,
)
from .mlp import (
    LmConfig,
    Mlp,
    MlpLayout,
    Scaler,
    TrainHistory,
    WindowDataset,
    fit_scaler,
    forward,
    init_mlp,
    jacobian,
    make_windows,
    predict_series,
    scale_windows,
    train_lm,
)
from .preprocess import (
    Preprocessor,
    SeasonalFactors,
    clearness_index,
    deseasonalize,
    fit,
    moving_average_ratio,
    seasonal_factors,
)
from .series import (
    CleaningReport,
    DailySeries,
    DayIndex,
    SynthConfig,
    clean,
    generate_synthetic,
    load_csv,
    write_csv,
)
from .solar import SiteSpec, daily_extraterrestrial, declination, h0_table
from .spectral import FisherTestResult, Periodogram, dominant_period, fisher_g_test, periodogram

__version__ = "0.1.0"
