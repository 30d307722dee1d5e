"""Sparse denoising autoencoder in plain numpy.

Encoder: input -> hidden (ReLU) ... -> latent (ELU).
Decoder: latent -> reversed hidden (ReLU) ... -> input (sigmoid).

Training minimises

    mean_i ||g(f(S_i * m_i)) - S_i||^2 + sparsity * mean_i ||f(S_i * m_i)||_1

with Bernoulli input masks ``m_i`` and Adam; backpropagation is written
out by hand. By default kept inputs are scaled by ``1 / keep_prob`` during
training (inverted dropout) so clean inputs at inference carry the same
expected magnitude the encoder was trained on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .stochastic import bernoulli_mask, make_rng

__all__ = [
    "AEWeights",
    "AETrainConfig",
    "TrainLog",
    "SparseDenoisingAutoencoder",
    "elu",
    "init_weights",
    "encode",
    "decode",
    "ae_loss",
    "reconstruction_mse",
    "train_ae",
]

RELU, ELU, SIGMOID = "relu", "elu", "sigmoid"


def elu(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def _activate(kind: str, h: np.ndarray) -> np.ndarray:
    if kind == RELU:
        return np.maximum(h, 0.0)
    if kind == ELU:
        return elu(h)
    return expit(h)


def _activation_grad(kind: str, h: np.ndarray, a: np.ndarray) -> np.ndarray:
    if kind == RELU:
        return (h > 0).astype(float)
    if kind == ELU:
        return np.where(h > 0, 1.0, a + 1.0)
    return a * (1.0 - a)


@dataclass
class AEWeights:
    """Layer matrices (``fan_in x fan_out``) and biases, encoder first."""

    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_encoder(self) -> int:
        return len(self.sizes) // 2

    @property
    def activations(self) -> list[str]:
        n_enc = self.n_encoder
        return [RELU] * (n_enc - 1) + [ELU] + [RELU] * (n_enc - 1) + [SIGMOID]

    @property
    def input_dim(self) -> int:
        return self.sizes[0]

    @property
    def latent_dim(self) -> int:
        return self.sizes[self.n_encoder]

    def copy(self) -> "AEWeights":
        return AEWeights(self.sizes, [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]


def layer_sizes(input_dim: int, hidden: tuple[int, ...], latent_dim: int) -> tuple[int, ...]:
    enc = (input_dim, *hidden, latent_dim)
    return enc + enc[-2::-1]


def init_weights(sizes: tuple[int, ...], rng: np.random.Generator) -> AEWeights:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return AEWeights(tuple(sizes), weights, biases)


def _forward(w: AEWeights, X: np.ndarray, start: int, stop: int):
    pre, post = [], [X]
    a = X
    acts = w.activations
    for i in range(start, stop):
        h = a @ w.weights[i] + w.biases[i]
        a = _activate(acts[i], h)
        pre.append(h)
        post.append(a)
    return pre, post


def encode(w: AEWeights, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != w.input_dim:
        raise ValueError(f"expected {w.input_dim} inputs, got {X.shape[1]}")
    z = _forward(w, X, 0, w.n_encoder)[1][-1]
    return z[0] if single else z


def decode(w: AEWeights, Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[1] != w.latent_dim:
        raise ValueError(f"expected {w.latent_dim} latent inputs, got {Z.shape[1]}")
    out = _forward(w, Z, w.n_encoder, len(w.weights))[1][-1]
    return out[0] if single else out


def reconstruction_mse(w: AEWeights, X: np.ndarray) -> float:
    """Mean over rows of the squared reconstruction norm, clean inputs."""
    err = decode(w, encode(w, X)) - X
    return float(np.mean(np.sum(err**2, axis=1)))


def ae_loss(w: AEWeights, X: np.ndarray, sparsity: float, mask: np.ndarray | None = None):
    """Loss and gradients (list aligned with ``w.params()``) on one batch.

    The mask multiplies the encoder input only; the target is always ``X``.
    The L1 subgradient at exactly zero is taken as zero.
    """
    X = np.asarray(X, dtype=float)
    N = X.shape[0]
    inputs = X if mask is None else X * mask
    pre, post = _forward(w, inputs, 0, len(w.weights))
    z = post[w.n_encoder]
    out = post[-1]
    resid = out - X
    loss = np.sum(resid**2) / N + sparsity * np.sum(np.abs(z)) / N

    acts = w.activations
    grads_w = [None] * len(w.weights)
    grads_b = [None] * len(w.weights)
    upstream = 2.0 * resid / N
    for i in range(len(w.weights) - 1, -1, -1):
        if i == w.n_encoder - 1:
            upstream = upstream + sparsity * np.sign(z) / N
        delta = upstream * _activation_grad(acts[i], pre[i], post[i + 1])
        grads_w[i] = post[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            upstream = delta @ w.weights[i].T
    grads = [g for pair in zip(grads_w, grads_b) for g in pair]
    return float(loss), grads


@dataclass
class AETrainConfig:
    hidden: tuple[int, ...] = (128, 64)
    latent_dim: int = 20
    sparsity: float = 1e-4
    keep_prob: float = 0.85
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 1000
    patience: int = 30
    mask_rescale: bool = True


@dataclass
class TrainLog:
    train_loss: list[float] = field(default_factory=list)
    val_mse: list[float] = field(default_factory=list)
    best_val: list[float] = field(default_factory=list)
    best_epoch: int = -1
    epochs_run: int = 0


def train_ae(X_train, X_val, config: AETrainConfig, seed: int) -> tuple[AEWeights, TrainLog]:
    """Mini-batch Adam with early stopping on clean validation MSE.

    Returns the weights of the best validation epoch.
    """
    X_train = np.asarray(X_train, dtype=float)
    X_val = np.asarray(X_val, dtype=float)
    if X_val.shape[0] == 0:
        raise ValueError("early stopping needs at least one validation row")
    sizes = layer_sizes(X_train.shape[1], tuple(config.hidden), config.latent_dim)
    w = init_weights(sizes, make_rng(seed, "ae.init"))
    params = w.params()
    m1 = [np.zeros_like(p) for p in params]
    m2 = [np.zeros_like(p) for p in params]
    b1, b2 = config.beta1, config.beta2
    step = 0

    log = TrainLog()
    best, best_val, wait = w.copy(), np.inf, 0
    N = X_train.shape[0]
    for epoch in range(config.max_epochs):
        order = make_rng(seed, f"ae.shuffle.epoch{epoch}").permutation(N)
        epoch_loss = 0.0
        for b, start in enumerate(range(0, N, config.batch_size)):
            batch = X_train[order[start:start + config.batch_size]]
            mask = bernoulli_mask(batch.shape, config.keep_prob,
                                  make_rng(seed, f"ae.mask.epoch{epoch}.batch{b}"))
            if config.mask_rescale and config.keep_prob > 0:
                mask /= config.keep_prob
            loss, grads = ae_loss(w, batch, config.sparsity, mask)
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"autoencoder loss became {loss} at epoch {epoch}, batch {b}"
                )
            epoch_loss += loss * batch.shape[0]
            step += 1
            corr1 = 1.0 - b1**step
            corr2 = 1.0 - b2**step
            for p, g, v1, v2 in zip(params, grads, m1, m2):
                v1 *= b1
                v1 += (1.0 - b1) * g
                v2 *= b2
                v2 += (1.0 - b2) * g * g
                p -= config.learning_rate * (v1 / corr1) / (np.sqrt(v2 / corr2) + config.eps)

        val = reconstruction_mse(w, X_val)
        log.train_loss.append(epoch_loss / N)
        log.val_mse.append(val)
        log.epochs_run = epoch + 1
        if val < best_val:
            best_val, best, wait = val, w.copy(), 0
            log.best_epoch = epoch
        else:
            wait += 1
        log.best_val.append(best_val)
        if wait >= config.patience:
            break
    return best, log


class SparseDenoisingAutoencoder(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``transform`` encodes, ``inverse_transform`` decodes.

    The last ``n_val`` rows passed to ``fit`` are held out (in order) for
    early stopping.
    """

    def __init__(self, hidden=(128, 64), latent_dim=20, sparsity=1e-4, keep_prob=0.85,
                 learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, batch_size=32,
                 max_epochs=1000, patience=30, mask_rescale=True, n_val=50, random_state=42):
        self.hidden = hidden
        self.latent_dim = latent_dim
        self.sparsity = sparsity
        self.keep_prob = keep_prob
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.mask_rescale = mask_rescale
        self.n_val = n_val
        self.random_state = random_state

    def _config(self) -> AETrainConfig:
        return AETrainConfig(
            hidden=tuple(self.hidden), latent_dim=self.latent_dim, sparsity=self.sparsity,
            keep_prob=self.keep_prob, learning_rate=self.learning_rate, beta1=self.beta1,
            beta2=self.beta2, eps=self.eps, batch_size=self.batch_size,
            max_epochs=self.max_epochs, patience=self.patience, mask_rescale=self.mask_rescale,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if not 0 < self.n_val < X.shape[0]:
            raise ValueError(f"n_val={self.n_val} leaves no training rows out of {X.shape[0]}")
        self.n_features_in_ = X.shape[1]
        self.weights_, self.log_ = train_ae(X[:-self.n_val], X[-self.n_val:],
                                            self._config(), self.random_state)
        return self

    @classmethod
    def from_weights(cls, weights: AEWeights, **params) -> "SparseDenoisingAutoencoder":
        n_enc = weights.n_encoder
        est = cls(hidden=tuple(weights.sizes[1:n_enc]), latent_dim=weights.latent_dim, **params)
        est.weights_ = weights
        est.n_features_in_ = weights.input_dim
        return est

    def transform(self, X):
        check_is_fitted(self, "weights_")
        return encode(self.weights_, check_array(X, dtype=np.float64))

    def inverse_transform(self, Z):
        check_is_fitted(self, "weights_")
        return decode(self.weights_, check_array(Z, dtype=np.float64))
