"""Sliding windows over latent codes and the chronological split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["WindowedDataset", "Split", "window_inputs", "build_windows", "split"]


@dataclass
class WindowedDataset:
    """Inputs ``X[r]`` built from days ``target_days[r]-k .. target_days[r]-1``."""

    X: np.ndarray
    Z_next: np.ndarray
    target_days: np.ndarray
    k: int

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, rows) -> "WindowedDataset":
        return WindowedDataset(self.X[rows], self.Z_next[rows], self.target_days[rows], self.k)


def window_inputs(codes, k: int = 5) -> np.ndarray:
    """Context vectors for every target day ``k .. T`` (``T - k + 1`` rows).

    Row ``r`` is ``[z_r, ..., z_{r+k-1}, z_{r+k-1} - z_{r+k-2}]``; the last row
    has no realised target and is the input for forecasting day ``T``.
    """
    codes = np.asarray(codes, dtype=float)
    if k < 2:
        raise ValueError(f"window size must be >= 2 for the difference term, got {k}")
    T, d = codes.shape
    if T < k:
        raise ValueError(f"need at least {k} codes, got {T}")
    n = T - k + 1
    stacked = np.lib.stride_tricks.sliding_window_view(codes, (k, d))[:, 0]
    stacked = stacked.reshape(n, k * d)
    momentum = codes[k - 1:] - codes[k - 2:T - 1]
    return np.hstack([stacked, momentum])


def build_windows(codes, k: int = 5) -> WindowedDataset:
    codes = np.asarray(codes, dtype=float)
    T = codes.shape[0]
    if T <= k:
        raise ValueError(f"need more than k={k} codes to form a target, got {T}")
    X = window_inputs(codes, k)[:-1]
    return WindowedDataset(X, codes[k:].copy(), np.arange(k, T), k)


@dataclass
class Split:
    train: WindowedDataset
    validation: WindowedDataset
    test: WindowedDataset


def split(ds: WindowedDataset, n_val: int = 50, n_test: int = 6) -> Split:
    """Chronological train / validation / test partition, no shuffling.

    With 500 daily codes and ``k=5`` this yields 439 / 50 / 6 windows. Test
    windows use realised codes for every prior day (walk-forward).
    """
    n = len(ds)
    n_train = n - n_val - n_test
    if n_val < 0 or n_test < 0 or n_train < 2:
        raise ValueError(
            f"{n} windows cannot hold {n_val} validation and {n_test} test windows "
            "plus at least 2 training windows"
        )
    idx = np.arange(n)
    return Split(
        ds.subset(idx[:n_train]),
        ds.subset(idx[n_train:n_train + n_val]),
        ds.subset(idx[n_train + n_val:]),
    )
