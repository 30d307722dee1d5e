"""Synthetic swaption-like surface panels.

Five smooth spatial shapes on the 14 x 16 tenor/maturity grid are driven by
AR(1) factors with Student-t innovations, stochastic volatility and
occasional jumps; a slow level drift and heteroskedastic cell noise sit on
top. Values are floored so every price is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .io import SurfacePanel, business_days
from .stochastic import make_rng

__all__ = ["SyntheticParams", "simulate_factors", "spatial_basis", "generate_synthetic"]

N_TENORS, N_MATURITIES = 14, 16


@dataclass(frozen=True)
class SyntheticParams:
    n_factors: int = 5
    ar_coef: float = 0.98
    innovation_scale: float = 0.2
    t_dof: float = 4.0
    vol_persistence: float = 0.95
    vol_of_vol: float = 0.2
    jump_prob: float = 0.02
    jump_scale: float = 4.0
    factor_amplitudes: tuple[float, ...] = (20.0, 10.0, 6.0, 4.0, 3.0)
    noise_scale: float = 0.5
    drift_amplitude: float = 10.0
    drift_period: float = 600.0
    floor: float = 1.0
    start_date: str = "2022-01-03"


def _tent(x: np.ndarray, centre: float, width: float) -> np.ndarray:
    return np.clip(1.0 - np.abs(x - centre) / width, 0.0, None)


def spatial_basis(n_tenors: int = N_TENORS, n_maturities: int = N_MATURITIES) -> np.ndarray:
    """``(5, n_tenors * n_maturities)`` bilinear bump shapes, row-major flattened."""
    u = np.linspace(0.0, 1.0, n_tenors)[:, None]
    v = np.linspace(0.0, 1.0, n_maturities)[None, :]
    bumps = [
        (0.5, 1.5, 0.5, 1.5),  # broad level shift
        (0.0, 0.8, 0.5, 1.2),  # short-tenor tilt
        (1.0, 0.9, 0.2, 0.8),  # long tenor, short maturity
        (0.4, 0.4, 0.7, 0.5),  # belly hump
        (0.8, 0.5, 1.0, 0.6),  # far corner
    ]
    shapes = [_tent(u, cu, wu) * _tent(v, cv, wv) for cu, wu, cv, wv in bumps]
    return np.stack([s.ravel() for s in shapes])


def simulate_factors(days: int, rng: np.random.Generator, params: SyntheticParams = SyntheticParams()):
    """AR(1) factor paths ``(days, n_factors)`` and the volatility multiplier path."""
    k, phi = params.n_factors, params.ar_coef
    log_vol = np.zeros(days)
    for t in range(1, days):
        log_vol[t] = params.vol_persistence * log_vol[t - 1] + params.vol_of_vol * rng.standard_normal()
    vol = np.exp(log_vol)

    dof = params.t_dof
    shocks = rng.standard_t(dof, size=(days, k)) * np.sqrt((dof - 2.0) / dof)
    jumps = (rng.random((days, k)) < params.jump_prob) * rng.standard_normal((days, k))
    innov = params.innovation_scale * (vol[:, None] * shocks + params.jump_scale * jumps)

    f = np.empty((days, k))
    f[0] = innov[0] / np.sqrt(1.0 - phi**2)
    for t in range(1, days):
        f[t] = phi * f[t - 1] + innov[t]
    return f, vol


def generate_synthetic(days: int = 500, seed: int = 42,
                       params: SyntheticParams = SyntheticParams()) -> SurfacePanel:
    if days < 7:
        raise ValueError(f"need at least 7 days, got {days}")
    rng = make_rng(seed, "synthetic")
    factors, vol = simulate_factors(days, rng, params)
    basis = spatial_basis()

    u = np.linspace(0.0, 1.0, N_TENORS)[:, None]
    v = np.linspace(0.0, 1.0, N_MATURITIES)[None, :]
    base = (80.0 + 60.0 * np.sqrt(u) + 40.0 * v - 20.0 * u * v).ravel()

    t = np.arange(days)
    drift = params.drift_amplitude * np.sin(2 * np.pi * t / params.drift_period) + 10.0 * t / days
    amps = np.asarray(params.factor_amplitudes[: params.n_factors])
    noise = params.noise_scale * vol[:, None] * rng.standard_normal((days, basis.shape[1]))
    values = base + drift[:, None] + (factors * amps) @ basis + noise
    values = np.maximum(values, params.floor)
    return SurfacePanel(values, business_days(params.start_date, days))
