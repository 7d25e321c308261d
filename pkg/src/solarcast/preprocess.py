"""Stationarization of daily irradiation and its exact inverse.

The chain: divide by daily extraterrestrial irradiation (clearness
index), divide by a centered 365-day moving average (ratio series),
average the ratios per day-of-year into 365 seasonal factors normalized
to unit mean, then divide the clearness series by its day's factor. The
corrected series keeps only the stochastic part; multiplying back by the
factor and H0 restores physical units.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .series import DailySeries, seasonal_day_of
from .solar import DAYS_PER_YEAR, SiteSpec, h0_table

DEFAULT_WINDOW_HALF_WIDTH = 182  # 2m+1 = 365 days


def clearness_index(series: DailySeries, h0: np.ndarray) -> DailySeries:
    """Divide each day's value by its day-of-year extraterrestrial total."""
    sd = series.seasonal_days()
    day_h0 = h0[sd - 1]
    present = np.isfinite(series.values)
    bad = present & (day_h0 <= 0.0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise DataError(
            f"H0 is zero on {series.date_at(i).isoformat()}; clearness index undefined"
        )
    return series.with_values(series.values / day_h0, label="clearness")


def moving_average_ratio(s: DailySeries, m: int = DEFAULT_WINDOW_HALF_WIDTH) -> DailySeries:
    """Ratio of each value to its centered (2m+1)-day mean.

    The window runs over the flat time axis, across year boundaries; the
    first and last m slots have no full window and are NaN.
    """
    v = s.values
    n = v.size
    if m < 1:
        raise DataError("window half-width m must be >= 1")
    if n < 2 * m + 1:
        raise DataError(f"series length {n} shorter than one full window ({2 * m + 1})")
    if not np.all(np.isfinite(v)):
        raise DataError("moving-average ratio requires a gap-free series")

    window_means = np.convolve(v, np.ones(2 * m + 1), mode="valid") / (2 * m + 1)
    if np.any(window_means <= 0.0):
        raise NumericalError("non-positive centered window mean")
    out = np.full(n, np.nan)
    out[m : n - m] = v[m : n - m] / window_means
    return s.with_values(out, label="ma-ratio")


@dataclass(frozen=True)
class SeasonalFactors:
    """Per-day-of-year multiplicative factors, normalized to unit mean.

    ``raw`` are the per-day means of the defined ratios, ``grand_mean``
    their average over the 365 days, ``final`` = raw / grand_mean, and
    ``n_years_used`` the per-day count of contributing years.
    """

    raw: np.ndarray
    grand_mean: float
    final: np.ndarray
    m: int
    n_years_used: np.ndarray

    def __post_init__(self):
        for name in ("raw", "final", "n_years_used"):
            arr = getattr(self, name)
            if arr.shape != (DAYS_PER_YEAR,):
                raise DataError(f"{name} must have exactly {DAYS_PER_YEAR} entries")
        if np.any(self.final <= 0.0):
            raise DataError("seasonal factors must be positive")


def seasonal_factors(ratios: DailySeries, m: int = DEFAULT_WINDOW_HALF_WIDTH) -> SeasonalFactors:
    """Average defined ratio values per day-of-year and normalize to mean 1."""
    sd = ratios.seasonal_days()
    defined = np.isfinite(ratios.values)
    counts = np.bincount(sd[defined] - 1, minlength=DAYS_PER_YEAR)
    if np.any(counts == 0):
        missing = int(np.flatnonzero(counts == 0)[0]) + 1
        raise DataError(f"no defined ratio for day-of-year {missing}")
    sums = np.bincount(sd[defined] - 1, weights=ratios.values[defined], minlength=DAYS_PER_YEAR)
    raw = sums / counts
    grand_mean = float(raw.mean())
    if grand_mean <= 0.0:
        raise NumericalError("non-positive grand mean of seasonal coefficients")
    return SeasonalFactors(
        raw=raw,
        grand_mean=grand_mean,
        final=raw / grand_mean,
        m=m,
        n_years_used=counts,
    )


def deseasonalize(s: DailySeries, f: SeasonalFactors) -> DailySeries:
    """Divide each clearness value by its day-of-year seasonal factor."""
    sd = s.seasonal_days()
    return s.with_values(s.values / f.final[sd - 1], label="corrected")


@dataclass(frozen=True)
class Preprocessor:
    """Fitted stationarization state: site, H0 table, seasonal factors."""

    site: SiteSpec
    h0: np.ndarray
    factors: SeasonalFactors

    def apply(self, series: DailySeries) -> DailySeries:
        """Corrected series: value / (H0(d) * factor(d))."""
        sd = series.seasonal_days()
        scale = self.h0[sd - 1] * self.factors.final[sd - 1]
        if np.any(np.isfinite(series.values) & (scale <= 0.0)):
            raise DataError("zero H0 inside the series span")
        return series.with_values(series.values / scale, label="corrected")

    def invert(self, corrected, days=None):
        """Back to Wh/m^2: corrected * factor(d) * H0(d).

        Accepts a DailySeries (returning one) or a value array plus a
        matching sequence of dates (returning an array).
        """
        if isinstance(corrected, DailySeries):
            sd = corrected.seasonal_days()
            scale = self.h0[sd - 1] * self.factors.final[sd - 1]
            return corrected.with_values(corrected.values * scale, label="inverted")
        values = np.asarray(corrected, dtype=np.float64)
        if days is None or len(days) != values.size:
            raise DataError("invert needs one date per corrected value")
        sd = np.array([seasonal_day_of(d) for d in days])
        return values * self.factors.final[sd - 1] * self.h0[sd - 1]


def fit(series: DailySeries, site: SiteSpec, m: int = DEFAULT_WINDOW_HALF_WIDTH) -> Preprocessor:
    """Fit the full chain on a cleaned multi-year series.

    Factors come only from the series passed here; fit on the training
    span and reuse the frozen state on later data.
    """
    if not np.all(np.isfinite(series.values)):
        raise DataError("fit requires a cleaned, gap-free series")
    h0 = h0_table(site)
    s = clearness_index(series, h0)
    ratios = moving_average_ratio(s, m=m)
    factors = seasonal_factors(ratios, m=m)
    return Preprocessor(site=site, h0=h0, factors=factors)
