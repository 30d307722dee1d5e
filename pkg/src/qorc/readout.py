"""Closed-form multi-output Ridge readout and forecast metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

__all__ = [
    "RidgeReadout",
    "ridge_objective",
    "select_alpha",
    "EvalReport",
    "latent_mse",
    "surface_rmse",
    "pooled_r2",
    "compute_metrics",
]


class RidgeReadout(RegressorMixin, BaseEstimator):
    """Ridge regression with an unpenalised intercept.

    Minimises ``sum_t ||z_t - W f_t - b||^2 + alpha * ||W||_F^2``. Features
    and targets are centred by their training means, the centred system
    ``(F'F + alpha I) W' = F'Z`` is solved by Cholesky, and
    ``b = mean(Z) - W mean(F)``.

    Attributes
    ----------
    coef_ : ndarray of shape (n_targets, n_features)
    intercept_ : ndarray of shape (n_targets,)
    feature_mean_, target_mean_ : training means used for centring
    """

    def __init__(self, alpha: float = 100.0):
        self.alpha = alpha

    def fit(self, F, Z):
        F = check_array(F, dtype=np.float64)
        Z = check_array(Z, dtype=np.float64, ensure_2d=False)
        if Z.ndim == 1:
            Z = Z[:, None]
        if F.shape[0] != Z.shape[0]:
            raise ValueError(f"F has {F.shape[0]} rows but Z has {Z.shape[0]}")
        if F.shape[0] < 2:
            raise ValueError("ridge fit needs at least 2 rows")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        self.n_features_in_ = F.shape[1]
        self.feature_mean_ = F.mean(axis=0)
        self.target_mean_ = Z.mean(axis=0)
        Fc = F - self.feature_mean_
        Zc = Z - self.target_mean_
        gram = Fc.T @ Fc
        gram[np.diag_indices_from(gram)] += self.alpha
        try:
            factor = cho_factor(gram, lower=False, check_finite=True)
        except LinAlgError as exc:
            raise ValueError(
                "normal equations are singular; use alpha > 0 for rank-deficient features"
            ) from exc
        pivots = np.diag(factor[0]) ** 2
        if pivots.min() <= pivots.max() * gram.shape[0] * np.finfo(float).eps:
            raise ValueError(
                "normal equations are numerically singular; use alpha > 0 "
                "for rank-deficient features"
            )
        W = cho_solve(factor, Fc.T @ Zc)
        self.coef_ = np.ascontiguousarray(W.T)
        self.intercept_ = self.target_mean_ - self.coef_ @ self.feature_mean_
        return self

    def predict(self, F):
        check_is_fitted(self, "coef_")
        F = np.asarray(F, dtype=np.float64)
        if F.shape[-1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {F.shape[-1]}")
        return F @ self.coef_.T + self.intercept_


def ridge_objective(F, Z, W, b, alpha) -> float:
    resid = Z - F @ W.T - b
    return float(np.sum(resid**2) + alpha * np.sum(W**2))


def select_alpha(F_train, Z_train, F_val, Z_val, grid=(1e-2, 1e-1, 1.0, 10.0, 100.0)):
    """Grid value with the lowest validation latent MSE, and all scores."""
    scores = {}
    for alpha in grid:
        pred = RidgeReadout(alpha).fit(F_train, Z_train).predict(F_val)
        scores[alpha] = latent_mse(pred, Z_val)
    return min(scores, key=scores.get), scores


def latent_mse(Z_hat, Z_true) -> float:
    """Mean over samples of the squared error norm."""
    err = np.asarray(Z_hat, dtype=float) - np.asarray(Z_true, dtype=float)
    if err.size == 0:
        raise ValueError("empty predictions")
    return float(np.mean(np.sum(np.atleast_2d(err) ** 2, axis=1)))


def surface_rmse(S_hat, S_true) -> float:
    err = np.asarray(S_hat, dtype=float) - np.asarray(S_true, dtype=float)
    if err.size == 0:
        raise ValueError("empty predictions")
    return float(np.sqrt(np.mean(err**2)))


def pooled_r2(Z_hat, Z_true) -> float:
    """R^2 of the flattened predictions against the flattened targets."""
    y = np.ravel(np.asarray(Z_true, dtype=float))
    y_hat = np.ravel(np.asarray(Z_hat, dtype=float))
    if y.size == 0:
        raise ValueError("empty predictions")
    sst = np.sum((y - y.mean()) ** 2)
    sse = np.sum((y - y_hat) ** 2)
    return float(1.0 - sse / sst)


@dataclass
class EvalReport:
    latent_mse: float
    surface_rmse: float
    r2: float
    per_day_rmse: list[float] = field(default_factory=list)
    n_samples: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def compute_metrics(Z_hat, Z_true, S_hat, S_true) -> EvalReport:
    Z_hat, Z_true = np.atleast_2d(Z_hat), np.atleast_2d(Z_true)
    S_hat, S_true = np.atleast_2d(S_hat), np.atleast_2d(S_true)
    if Z_hat.shape != Z_true.shape or S_hat.shape != S_true.shape:
        raise ValueError("prediction and target shapes differ")
    if Z_hat.shape[0] != S_hat.shape[0]:
        raise ValueError("latent and surface predictions cover different days")
    per_day = np.sqrt(np.mean((S_hat - S_true) ** 2, axis=1))
    return EvalReport(
        latent_mse=latent_mse(Z_hat, Z_true),
        surface_rmse=surface_rmse(S_hat, S_true),
        r2=pooled_r2(Z_hat, Z_true),
        per_day_rmse=[float(v) for v in per_day],
        n_samples=int(Z_hat.shape[0]),
    )
