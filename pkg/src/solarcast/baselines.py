"""Classical one-day-ahead forecasters.

Six reference predictors with a shared contract: fit once on the
training span, then predict each test day from measured history without
refitting. Value models (AR, ARMA, Markov, Bayes, k-NN) work on a plain
value sequence (raw Wh/m^2 or the corrected dimensionless series); the
naive predictor works on the calendar (per-day-of-year training mean).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, NumericalError
from .series import DailySeries, seasonal_day_of
from .solar import DAYS_PER_YEAR

RIDGE = 1e-9


# ---------------------------------------------------------------------------
# naive day-of-year mean
# ---------------------------------------------------------------------------


def naive_day_means(history: DailySeries) -> np.ndarray:
    """Mean of present values per day-of-year slot; NaN where no data."""
    sd = history.seasonal_days()
    present = np.isfinite(history.values)
    counts = np.bincount(sd[present] - 1, minlength=DAYS_PER_YEAR)
    sums = np.bincount(sd[present] - 1, weights=history.values[present], minlength=DAYS_PER_YEAR)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return means


def naive_predict(history: DailySeries, target) -> float:
    """Training mean of the target's day-of-year (a date or DayIndex)."""
    if hasattr(target, "to_date"):
        target = target.to_date()
    means = naive_day_means(history)
    value = means[seasonal_day_of(target) - 1]
    if np.isnan(value):
        raise DataError(f"no historical value for day-of-year of {target.isoformat()}")
    return float(value)


# ---------------------------------------------------------------------------
# linear models (AR / ARMA by two-stage least squares)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearModel:
    """AR/MA coefficients, most-recent lag first, plus an intercept."""

    ar: np.ndarray
    ma: np.ndarray
    intercept: float

    @property
    def p(self) -> int:
        return self.ar.size

    @property
    def q(self) -> int:
        return self.ma.size


def _lag_matrix(x: np.ndarray, k: int) -> np.ndarray:
    """Rows t = k..n-1 holding [x_{t-1}, ..., x_{t-k}]."""
    windows = np.lib.stride_tricks.sliding_window_view(x, k)[: x.size - k]
    return windows[:, ::-1]


def _ridge_ols(x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Least squares with an unpenalized intercept and a tiny ridge on slopes.

    Centering makes the intercept exact for degenerate inputs (constant
    series fit as intercept-only) while the ridge keeps the normal
    equations nonsingular.
    """
    if x.shape[1] == 0:
        return float(y.mean()), np.empty(0)
    xm = x.mean(axis=0)
    ym = y.mean()
    xc = x - xm
    yc = y - ym
    a = xc.T @ xc + RIDGE * np.eye(x.shape[1])
    try:
        beta = np.linalg.solve(a, xc.T @ yc)
    except np.linalg.LinAlgError as e:  # pragma: no cover - ridge prevents this
        raise NumericalError("singular normal equations") from e
    return float(ym - xm @ beta), beta


def fit_ar(values, p: int) -> LinearModel:
    """Autoregression of order p by ordinary least squares."""
    x = np.asarray(values, dtype=np.float64)
    if p < 0:
        raise DataError("AR order must be >= 0")
    if x.size <= 10 * p or x.size < 2:
        raise DataError(f"series too short ({x.size}) for AR({p})")
    if p == 0:
        return LinearModel(ar=np.empty(0), ma=np.empty(0), intercept=float(x.mean()))
    intercept, phi = _ridge_ols(_lag_matrix(x, p), x[p:])
    return LinearModel(ar=phi, ma=np.empty(0), intercept=intercept)


def fit_arma(values, p: int, q: int) -> LinearModel:
    """ARMA(p, q) by the two-stage regression on residual proxies.

    Stage 1 fits a long AR (order max(20, 2(p+q))) whose one-step errors
    stand in for the unobserved innovations; stage 2 regresses the value
    on p value lags and q proxy lags.
    """
    x = np.asarray(values, dtype=np.float64)
    if p < 0 or q < 0:
        raise DataError("ARMA orders must be >= 0")
    if q == 0:
        if x.size <= 10 * p:
            raise DataError(f"series too short ({x.size}) for ARMA({p},0)")
        return fit_ar(x, p)
    if x.size <= 10 * (p + q):
        raise DataError(f"series too short ({x.size}) for ARMA({p},{q})")

    long_order = max(20, 2 * (p + q))
    if x.size <= long_order + q + max(p, 1):
        raise DataError("series too short for the long-AR residual stage")
    c0, phi0 = _ridge_ols(_lag_matrix(x, long_order), x[long_order:])
    resid = x[long_order:] - (c0 + _lag_matrix(x, long_order) @ phi0)

    # Row t in the stage-2 regression: target x[t], value lags x[t-1..t-p],
    # proxy lags resid for times t-1..t-q (resid[i] belongs to x[long_order+i]).
    t0 = long_order + q
    targets = x[t0:]
    n_rows = targets.size
    cols = np.empty((n_rows, p + q))
    for i in range(p):
        cols[:, i] = x[t0 - 1 - i : t0 - 1 - i + n_rows]
    for j in range(q):
        cols[:, p + j] = resid[q - 1 - j : q - 1 - j + n_rows]
    intercept, beta = _ridge_ols(cols, targets)
    return LinearModel(ar=beta[:p], ma=beta[p:], intercept=intercept)


def predict_linear(model: LinearModel, lags, residuals=()) -> float:
    """intercept + sum(ar_i * lag_i) + sum(ma_j * residual_j).

    ``lags`` and ``residuals`` are most-recent-first.
    """
    lags = np.asarray(lags, dtype=np.float64)
    residuals = np.asarray(residuals, dtype=np.float64)
    if lags.size < model.p:
        raise DataError(f"need {model.p} lags, got {lags.size}")
    if residuals.size < model.q:
        raise DataError(f"need {model.q} residuals, got {residuals.size}")
    out = model.intercept
    if model.p:
        out += float(model.ar @ lags[: model.p])
    if model.q:
        out += float(model.ma @ residuals[: model.q])
    return float(out)


def one_step_residuals(model: LinearModel, values) -> np.ndarray:
    """Filter the series through the model; residuals start at max(p, q)."""
    x = np.ascontiguousarray(values, dtype=np.float64)
    return kernels.arma_residuals(x, model.ar, model.ma, model.intercept)


def predict_next_linear(model: LinearModel, history) -> float:
    """One-step-ahead forecast after filtering the history for residuals."""
    x = np.asarray(history, dtype=np.float64)
    if x.size < max(model.p, model.q):
        raise DataError("history shorter than the model order")
    lags = x[::-1][: model.p]
    if model.q:
        resid = one_step_residuals(model, x)[::-1][: model.q]
    else:
        resid = ()
    return predict_linear(model, lags, resid)


# ---------------------------------------------------------------------------
# discretizer + Markov chain + naive Bayes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Discretizer:
    """Equal-width classes over the fitted value range.

    Out-of-range values clamp to the edge classes; the maximum maps into
    the last class.
    """

    edges: np.ndarray
    centers: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.centers.size

    def classes_of(self, values) -> np.ndarray:
        x = np.asarray(values, dtype=np.float64)
        lo, hi = self.edges[0], self.edges[-1]
        width = (hi - lo) / self.n_classes
        idx = np.floor((x - lo) / width).astype(np.int64)
        return np.clip(idx, 0, self.n_classes - 1)

    def class_of(self, value: float) -> int:
        return int(self.classes_of(np.asarray([value]))[0])


def fit_discretizer(values, n_classes: int = 50) -> Discretizer:
    x = np.asarray(values, dtype=np.float64)
    if n_classes < 2:
        raise DataError("need at least 2 classes")
    if x.size < 2:
        raise DataError("need at least 2 values to fit a discretizer")
    lo, hi = float(np.min(x)), float(np.max(x))
    if lo == hi:
        raise DataError("cannot discretize a constant series")
    edges = np.linspace(lo, hi, n_classes + 1)
    centers = (edges[:-1] + edges[1:]) / 2.0
    return Discretizer(edges=edges, centers=centers)


@dataclass
class MarkovModel:
    """Class-transition counts for context lengths 1..order plus marginals."""

    order: int
    discretizer: Discretizer
    counts: dict
    marginal: np.ndarray
    smoothing: float = 1.0


def fit_markov(values, discretizer: Discretizer, order: int = 3) -> MarkovModel:
    x = np.asarray(values, dtype=np.float64)
    if order < 1:
        raise DataError("Markov order must be >= 1")
    if x.size <= order:
        raise DataError("series shorter than the Markov order")
    classes = discretizer.classes_of(x)
    n = discretizer.n_classes
    counts: dict[int, dict[tuple, np.ndarray]] = {k: {} for k in range(1, order + 1)}
    marginal = np.zeros(n)
    for t in range(classes.size - 1):
        nxt = classes[t + 1]
        marginal[nxt] += 1.0
        for k in range(1, order + 1):
            if t - k + 1 < 0:
                continue
            ctx = tuple(classes[t - k + 1 : t + 1])
            table = counts[k].setdefault(ctx, np.zeros(n))
            table[nxt] += 1.0
    return MarkovModel(order=order, discretizer=discretizer, counts=counts, marginal=marginal)


def predict_markov(model: MarkovModel, recent) -> float:
    """Expected next value under the smoothed conditional distribution.

    Contexts never seen in training fall back to shorter contexts and
    finally to the marginal next-class distribution.
    """
    recent = np.asarray(recent, dtype=np.float64)
    if recent.size < model.order:
        raise DataError(f"need {model.order} recent values, got {recent.size}")
    classes = model.discretizer.classes_of(recent)
    n = model.discretizer.n_classes
    alpha = model.smoothing
    for k in range(model.order, 0, -1):
        ctx = tuple(classes[-k:])
        table = model.counts[k].get(ctx)
        if table is not None:
            probs = (table + alpha) / (table.sum() + alpha * n)
            return float(probs @ model.discretizer.centers)
    probs = (model.marginal + alpha) / (model.marginal.sum() + alpha * n)
    return float(probs @ model.discretizer.centers)


@dataclass
class BayesModel:
    """Naive-Bayes counts: class priors and per-lag conditional tables."""

    order: int
    discretizer: Discretizer
    prior_counts: np.ndarray
    cond_counts: np.ndarray  # (order, n_classes next, n_classes lag)
    smoothing: float = 1.0


def fit_bayes(values, discretizer: Discretizer, order: int = 3) -> BayesModel:
    x = np.asarray(values, dtype=np.float64)
    if order < 0:
        raise DataError("Bayes order must be >= 0")
    if x.size <= order:
        raise DataError("series shorter than the Bayes order")
    classes = discretizer.classes_of(x)
    n = discretizer.n_classes
    prior = np.zeros(n)
    cond = np.zeros((max(order, 1), n, n))
    for t in range(max(order - 1, 0), classes.size - 1):
        nxt = classes[t + 1]
        prior[nxt] += 1.0
        for j in range(1, order + 1):
            cond[j - 1, nxt, classes[t + 1 - j]] += 1.0
    return BayesModel(
        order=order, discretizer=discretizer, prior_counts=prior, cond_counts=cond
    )


def predict_bayes(model: BayesModel, recent) -> float:
    """Posterior-weighted mean of class centers given the lag classes."""
    n = model.discretizer.n_classes
    alpha = model.smoothing
    prior = (model.prior_counts + alpha) / (model.prior_counts.sum() + alpha * n)
    log_post = np.log(prior)
    if model.order > 0:
        recent = np.asarray(recent, dtype=np.float64)
        if recent.size < model.order:
            raise DataError(f"need {model.order} recent values, got {recent.size}")
        classes = model.discretizer.classes_of(recent)
        denom = model.prior_counts + alpha * n
        for j in range(1, model.order + 1):
            lag_class = classes[-j]
            log_post += np.log((model.cond_counts[j - 1, :, lag_class] + alpha) / denom)
    log_post -= log_post.max()
    post = np.exp(log_post)
    post /= post.sum()
    return float(post @ model.discretizer.centers)


# ---------------------------------------------------------------------------
# k-nearest-neighbor analogs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KnnConfig:
    k: int = 10
    window: int = 10

    def __post_init__(self):
        if self.k < 1 or self.window < 1:
            raise DataError("k and window must be >= 1")


def knn_predict(history, query, cfg: KnnConfig) -> float:
    """Mean successor of the k history windows closest to the query.

    Candidate windows are those with a successor inside the history (the
    trailing window, which is the query itself in one-step use, has
    none). Distance ties resolve toward the earlier window.
    """
    h = np.ascontiguousarray(history, dtype=np.float64)
    q = np.ascontiguousarray(query, dtype=np.float64)
    if q.size != cfg.window:
        raise DataError(f"query length {q.size} != window {cfg.window}")
    if h.size < cfg.window + 2:
        raise DataError("history must be longer than window + 1")
    n_candidates = h.size - cfg.window
    if cfg.k > n_candidates:
        raise DataError(f"k={cfg.k} exceeds the {n_candidates} candidate windows")
    dists = kernels.window_sq_distances(h, q, n_candidates)
    order = np.argsort(dists, kind="stable")[: cfg.k]
    successors = h[order + cfg.window]
    return float(successors.mean())


# ---------------------------------------------------------------------------
# uniform fit/predict wrappers used by the evaluation harness
# ---------------------------------------------------------------------------


class OneStepModel:
    """fit(train) once, then predict_next(history values, target date)."""

    name = "base"

    def fit(self, train: DailySeries) -> "OneStepModel":
        raise NotImplementedError

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        raise NotImplementedError


class NaiveModel(OneStepModel):
    name = "naive"

    def __init__(self):
        self.day_means = None

    def fit(self, train: DailySeries) -> "NaiveModel":
        self.day_means = naive_day_means(train)
        return self

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        value = self.day_means[seasonal_day_of(target) - 1]
        if np.isnan(value):
            raise DataError(f"no training value for day-of-year of {target.isoformat()}")
        return float(value)


class ArModel(OneStepModel):
    name = "ar"

    def __init__(self, p: int = 8):
        self.p = p
        self.model = None

    def fit(self, train: DailySeries) -> "ArModel":
        self.model = fit_ar(train.values, self.p)
        return self

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        return predict_next_linear(self.model, history)


class ArmaModel(OneStepModel):
    name = "arma"

    def __init__(self, p: int = 2, q: int = 2):
        self.p = p
        self.q = q
        self.model = None

    def fit(self, train: DailySeries) -> "ArmaModel":
        self.model = fit_arma(train.values, self.p, self.q)
        return self

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        return predict_next_linear(self.model, history)


class MarkovChainModel(OneStepModel):
    name = "markov"

    def __init__(self, order: int = 3, n_classes: int = 50):
        self.order = order
        self.n_classes = n_classes
        self.model = None

    def fit(self, train: DailySeries) -> "MarkovChainModel":
        d = fit_discretizer(train.values, self.n_classes)
        self.model = fit_markov(train.values, d, self.order)
        return self

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        return predict_markov(self.model, history[-self.order :])


class BayesClassifierModel(OneStepModel):
    name = "bayes"

    def __init__(self, order: int = 3, n_classes: int = 50):
        self.order = order
        self.n_classes = n_classes
        self.model = None

    def fit(self, train: DailySeries) -> "BayesClassifierModel":
        d = fit_discretizer(train.values, self.n_classes)
        self.model = fit_bayes(train.values, d, self.order)
        return self

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        recent = history[-self.order :] if self.order else history[:0]
        return predict_bayes(self.model, recent)


class KnnModel(OneStepModel):
    name = "knn"

    def __init__(self, k: int = 10, window: int = 10):
        self.cfg = KnnConfig(k=k, window=window)

    def fit(self, train: DailySeries) -> "KnnModel":
        return self  # lazy learner: history arrives at prediction time

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        return knn_predict(history, history[-self.cfg.window :], self.cfg)
