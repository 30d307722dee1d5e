"""Winsorize -> robust-scale -> min-max chain for surface panels."""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

__all__ = ["RobustChainScaler", "DegenerateColumnWarning"]


class DegenerateColumnWarning(UserWarning):
    pass


class RobustChainScaler(TransformerMixin, BaseEstimator):
    """Invertible per-column scaling robust to fat tails.

    Each column is clipped to its training ``[lower_q, upper_q]`` percentiles,
    centred by the training median and divided by the IQR, then mapped
    onto ``[0, 1]`` using the min and max of the scaled training data.
    Percentiles use linear interpolation between order statistics.

    Rows outside the training range are not clipped after the robust stage,
    so validation or test values may land slightly outside ``[0, 1]``.

    Degenerate columns: a zero IQR is replaced by 1; a column whose scaled
    training range is empty maps to 0.5 and inverts to its constant value.

    Attributes
    ----------
    lower_, upper_ : winsorisation bounds per column (price units)
    median_, iqr_ : robust centre and scale per column
    min_, max_ : range of the robust-scaled training data
    constant_ : boolean mask of columns with an empty training range
    """

    def __init__(self, lower_q: float = 0.01, upper_q: float = 0.99):
        self.lower_q = lower_q
        self.upper_q = upper_q

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[0] < 2:
            raise ValueError("RobustChainScaler needs at least 2 training rows")
        self.n_features_in_ = X.shape[1]
        self.lower_, self.upper_ = np.percentile(
            X, [100 * self.lower_q, 100 * self.upper_q], axis=0
        )
        clipped = np.clip(X, self.lower_, self.upper_)
        q25, med, q75 = np.percentile(clipped, [25, 50, 75], axis=0)
        iqr = q75 - q25
        self.zero_iqr_ = iqr <= 0
        self.median_ = med
        self.iqr_ = np.where(self.zero_iqr_, 1.0, iqr)
        scaled = (clipped - self.median_) / self.iqr_
        self.min_ = scaled.min(axis=0)
        self.max_ = scaled.max(axis=0)
        self.constant_ = self.max_ <= self.min_
        if self.zero_iqr_.any() or self.constant_.any():
            warnings.warn(
                f"{int(self.zero_iqr_.sum())} column(s) with zero IQR and "
                f"{int(self.constant_.sum())} constant column(s) were guarded",
                DegenerateColumnWarning,
                stacklevel=2,
            )
        return self

    def _check(self, X):
        check_is_fitted(self, "min_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, scaler was fitted on {self.n_features_in_}"
            )
        return X

    def transform(self, X):
        X = self._check(X)
        scaled = (np.clip(X, self.lower_, self.upper_) - self.median_) / self.iqr_
        span = np.where(self.constant_, 1.0, self.max_ - self.min_)
        out = (scaled - self.min_) / span
        out[:, self.constant_] = 0.5
        return out

    def inverse_transform(self, Y):
        Y = self._check(Y)
        span = np.where(self.constant_, 1.0, self.max_ - self.min_)
        scaled = Y * span + self.min_
        scaled[:, self.constant_] = self.min_[self.constant_]
        return scaled * self.iqr_ + self.median_
