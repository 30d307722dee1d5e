"""End-to-end surface forecaster and the train / evaluate / audit / bench drivers."""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .autoencoder import SparseDenoisingAutoencoder, decode
from .io import SurfacePanel
from .preprocess import RobustChainScaler
from .readout import RidgeReadout, compute_metrics, surface_rmse
from .reservoir import ENSEMBLE, SIMPLE_PML, QuantumReservoirFeatures
from .temporal import build_windows, window_inputs

__all__ = [
    "VARIANTS",
    "PipelineConfig",
    "SurfaceForecaster",
    "StageError",
    "TrainResult",
    "run_train",
    "evaluate",
    "compare_variants",
    "audit_leakage",
    "bench_latency",
]

log = logging.getLogger(__name__)

VARIANTS = {
    "qorc": {"specs": ENSEMBLE, "alpha": 100.0},
    "classical": {"specs": None, "alpha": 1.0},
    "simple-pml": {"specs": SIMPLE_PML, "alpha": 100.0},
}


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage


@dataclass
class PipelineConfig:
    seed: int = 42
    variant: str = "qorc"
    window: int = 5
    latent_dim: int = 20
    hidden: tuple[int, ...] = (128, 64)
    alpha: float | None = None  # None: the variant's default
    sparsity: float = 1e-4
    keep_prob: float = 0.85
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 1000
    patience: int = 30
    mask_rescale: bool = True
    ae_val_days: int = 50
    n_val: int = 50
    n_test: int = 6
    synthetic_days: int = 500

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {sorted(VARIANTS)}")
        self.hidden = tuple(int(h) for h in self.hidden)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(mapping) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**mapping)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    @property
    def resolved_alpha(self) -> float:
        return VARIANTS[self.variant]["alpha"] if self.alpha is None else float(self.alpha)

    def n_train_days(self, total_days: int) -> int:
        return total_days - self.n_val - self.n_test

    def forecaster(self) -> "SurfaceForecaster":
        return SurfaceForecaster(
            variant=self.variant, window=self.window, alpha=self.resolved_alpha,
            latent_dim=self.latent_dim, hidden=self.hidden, sparsity=self.sparsity,
            keep_prob=self.keep_prob, learning_rate=self.learning_rate,
            batch_size=self.batch_size, max_epochs=self.max_epochs, patience=self.patience,
            mask_rescale=self.mask_rescale, ae_val_days=self.ae_val_days, random_state=self.seed,
        )


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


class SurfaceForecaster(BaseEstimator):
    """Next-day surface forecaster.

    ``fit`` receives only the training days, in order. It fits the robust
    scaler, trains the autoencoder (early-stopping on the last
    ``ae_val_days`` of those days), encodes, windows, extracts reservoir
    features and fits the Ridge readout. ``predict(S)`` returns one
    forecast per window of ``S``: row ``r`` forecasts day ``r + window``,
    the last row being the forecast for the day after ``S`` ends.
    """

    def __init__(self, variant="qorc", window=5, alpha=100.0, latent_dim=20, hidden=(128, 64),
                 sparsity=1e-4, keep_prob=0.85, learning_rate=1e-3, batch_size=32,
                 max_epochs=1000, patience=30, mask_rescale=True, ae_val_days=50,
                 random_state=42):
        self.variant = variant
        self.window = window
        self.alpha = alpha
        self.latent_dim = latent_dim
        self.hidden = hidden
        self.sparsity = sparsity
        self.keep_prob = keep_prob
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.mask_rescale = mask_rescale
        self.ae_val_days = ae_val_days
        self.random_state = random_state

    def fit(self, S, y=None):
        S = check_array(S, dtype=np.float64)
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.n_features_in_ = S.shape[1]
        self.fit_rows_ = S.shape[0]
        self.scaler_ = _stage("preprocess", RobustChainScaler().fit, S)
        Y = self.scaler_.transform(S)
        self.autoencoder_ = SparseDenoisingAutoencoder(
            hidden=tuple(self.hidden), latent_dim=self.latent_dim, sparsity=self.sparsity,
            keep_prob=self.keep_prob, learning_rate=self.learning_rate,
            batch_size=self.batch_size, max_epochs=self.max_epochs, patience=self.patience,
            mask_rescale=self.mask_rescale, n_val=self.ae_val_days, random_state=self.random_state,
        )
        _stage("autoencoder", self.autoencoder_.fit, Y)
        codes = self.autoencoder_.transform(Y)
        ds = _stage("windowing", build_windows, codes, self.window)
        specs = VARIANTS[self.variant]["specs"]
        if specs is None:
            self.features_ = None
            F = ds.X
        else:
            self.features_ = QuantumReservoirFeatures(specs=specs, random_state=self.random_state)
            F = _stage("reservoir", self.features_.fit_transform, ds.X)
        start = time.perf_counter()
        self.readout_ = _stage("readout", RidgeReadout(self.alpha).fit, F, ds.Z_next)
        self.readout_fit_seconds_ = time.perf_counter() - start
        self.n_train_windows_ = len(ds)
        return self

    def encode(self, S) -> np.ndarray:
        check_is_fitted(self, "readout_")
        return self.autoencoder_.transform(self.scaler_.transform(S))

    def decode(self, Z) -> np.ndarray:
        """Latent codes -> surfaces in price units."""
        check_is_fitted(self, "readout_")
        return self.scaler_.inverse_transform(self.autoencoder_.inverse_transform(Z))

    def features(self, X) -> np.ndarray:
        """Readout design matrix for context rows."""
        X = np.atleast_2d(X)
        return X if self.features_ is None else self.features_.transform(X)

    def predict_latent(self, S) -> np.ndarray:
        codes = self.encode(S)
        return self.readout_.predict(self.features(window_inputs(codes, self.window)))

    def predict(self, S) -> np.ndarray:
        return self.decode(self.predict_latent(S))

    @property
    def n_readout_features(self) -> int:
        check_is_fitted(self, "readout_")
        return self.readout_.n_features_in_


@dataclass
class TrainResult:
    model: SurfaceForecaster
    report: dict
    timings: dict = field(default_factory=dict)


def evaluate(model: SurfaceForecaster, panel: SurfacePanel, config: PipelineConfig) -> dict:
    """Validation and walk-forward test metrics on the held-out tail of ``panel``.

    Test forecasts use realised codes for all earlier days. Surface errors
    are measured in price units against the raw panel.
    """
    S = panel.values
    T = len(panel)
    k = model.window
    n_train = config.n_train_days(T)
    if n_train - k < 2:
        raise ValueError(f"{T} days leave too few training windows")

    codes = model.encode(S)
    Z_hat = model.readout_.predict(model.features(window_inputs(codes, k)[:-1]))
    target_days = np.arange(k, T)
    S_hat = model.decode(Z_hat)
    train_mean = S[:n_train].mean(axis=0)

    blocks = {
        "validation": (n_train, n_train + config.n_val),
        "test": (n_train + config.n_val, T),
    }
    report = {
        "variant": config.variant,
        "seed": config.seed,
        "alpha": model.alpha,
        "n_readout_features": model.n_readout_features,
        "days": {"total": T, "train": n_train, "validation": config.n_val, "test": config.n_test},
        "n_train_windows": int(n_train - k),
        "autoencoder": {
            "best_epoch": int(model.autoencoder_.log_.best_epoch)
            if hasattr(model.autoencoder_, "log_") else None,
            "epochs_run": int(model.autoencoder_.log_.epochs_run)
            if hasattr(model.autoencoder_, "log_") else None,
        },
        "baselines": {},
    }
    for name, (lo, hi) in blocks.items():
        if hi <= lo:
            continue
        rows = (target_days >= lo) & (target_days < hi)
        metrics = compute_metrics(Z_hat[rows], codes[lo:hi], S_hat[rows], S[lo:hi])
        block = metrics.to_dict()
        block["dates"] = panel.dates[lo:hi]
        report[name] = block
        report["baselines"][f"{name}_train_mean_rmse"] = surface_rmse(
            np.broadcast_to(train_mean, S[lo:hi].shape), S[lo:hi])
        report["baselines"][f"{name}_persistence_rmse"] = surface_rmse(S[lo - 1:hi - 1], S[lo:hi])
    return report


def run_train(config: PipelineConfig, panel: SurfacePanel) -> TrainResult:
    """Fit on the training days of ``panel`` and evaluate on the rest."""
    n_train = config.n_train_days(len(panel))
    if n_train < config.window + 2:
        raise StageError("split", ValueError(f"{len(panel)} days is too short for this config"))
    log.info("fitting %s on %d training days", config.variant, n_train)
    start = time.perf_counter()
    model = config.forecaster().fit(panel.values[:n_train])
    train_seconds = time.perf_counter() - start
    report = _stage("evaluate", evaluate, model, panel, config)
    timings = {
        "train_seconds": train_seconds,
        "readout_fit_seconds": model.readout_fit_seconds_,
    }
    return TrainResult(model, report, timings)


def compare_variants(panel: SurfacePanel, config: PipelineConfig,
                     variants=("qorc", "classical", "simple-pml")) -> list[dict]:
    """Test metrics of several variants with independent latent and surface ranks."""
    rows = []
    for variant in variants:
        result = run_train(config.replace(variant=variant, alpha=None), panel)
        test = result.report["test"]
        rows.append({
            "variant": variant,
            "n_features": result.report["n_readout_features"],
            "latent_mse": test["latent_mse"],
            "surface_rmse": test["surface_rmse"],
            "r2": test["r2"],
        })
    for key in ("latent_mse", "surface_rmse"):
        for rank, row in enumerate(sorted(rows, key=lambda r: r[key]), start=1):
            row[f"{key}_rank"] = rank
    return rows


def _fitted_arrays(model: SurfaceForecaster) -> dict[str, np.ndarray]:
    from .bundle import model_arrays

    return model_arrays(model)


def audit_leakage(panel: SurfacePanel, config: PipelineConfig) -> dict:
    """Check that no fitted quantity depends on validation or test days.

    The pipeline is fitted twice: on ``panel`` and on a copy whose
    validation and test rows are replaced by unrelated values. Every
    fitted array (scaler statistics, autoencoder weights and early-stop
    epoch, feature standardiser, Ridge weights) must match bit for bit,
    and each stage must have seen exactly the training rows.
    """
    n_train = config.n_train_days(len(panel))
    rng = np.random.default_rng(0)
    poisoned = panel.values.copy()
    tail = poisoned[n_train:]
    poisoned[n_train:] = tail[::-1] * 3.0 + 50.0 * rng.standard_normal(tail.shape) + 500.0

    clean = run_train(config, panel)
    dirty = run_train(config, SurfacePanel(poisoned, panel.dates))
    a, b = _fitted_arrays(clean.model), _fitted_arrays(dirty.model)
    checks = {name: bool(np.array_equal(a[name], b[name])) for name in sorted(a)}
    checks["ae.best_epoch"] = (clean.model.autoencoder_.log_.best_epoch
                               == dirty.model.autoencoder_.log_.best_epoch)
    checks["fit_rows"] = clean.model.fit_rows_ == n_train
    checks["train_windows"] = clean.model.n_train_windows_ == n_train - config.window
    # the poison must be visible downstream, or the audit proves nothing
    checks["poison_detected"] = (clean.report["test"]["surface_rmse"]
                                 != dirty.report["test"]["surface_rmse"])
    return {
        "passed": all(checks.values()),
        "train_days": n_train,
        "checks": checks,
    }


def bench_latency(model: SurfaceForecaster, panel: SurfacePanel, n_samples: int = 1000,
                  repeats: int = 3) -> dict:
    """Per-sample inference latency in milliseconds.

    ``readout_ms`` times the Ridge matmul, decoder and inverse scaling on
    a precomputed feature row. ``features_ms`` times simulated reservoir
    feature extraction, per reservoir, which the readout figure excludes.
    """
    S = panel.values
    k = model.window
    X = window_inputs(model.encode(S), k)
    F = model.features(X)
    scaler, weights, readout = model.scaler_, model.autoencoder_.weights_, model.readout_

    def readout_once(f):
        z = f @ readout.coef_.T + readout.intercept_
        return scaler.inverse_transform(decode(weights, z[None, :]))

    runs = []
    for _ in range(repeats):
        total = 0.0
        for i in range(n_samples):
            f = F[i % len(F)]
            t0 = time.perf_counter()
            readout_once(f)
            total += time.perf_counter() - t0
        runs.append(1e3 * total / n_samples)

    per_reservoir = {}
    if model.features_ is not None:
        n_feat = min(n_samples, 50)
        for r in model.features_.reservoirs_:
            t0 = time.perf_counter()
            for i in range(n_feat):
                r.features(X[i % len(X)])
            per_reservoir[r.spec.label] = 1e3 * (time.perf_counter() - t0) / n_feat

    n_fit = min(len(F), model.n_train_windows_)
    t0 = time.perf_counter()
    RidgeReadout(model.alpha).fit(F[:n_fit], np.zeros((n_fit, model.latent_dim)))
    fit_seconds = time.perf_counter() - t0
    return {
        "n_readout_features": int(F.shape[1]),
        "readout_ms": float(np.mean(runs)),
        "readout_ms_runs": runs,
        "readout_stability_ratio": float(max(runs) / min(runs)),
        "features_ms": per_reservoir,
        "full_ms": float(np.mean(runs) + sum(per_reservoir.values())),
        "ridge_fit_seconds": fit_seconds,
        "ridge_fit_rows": int(n_fit),
    }
