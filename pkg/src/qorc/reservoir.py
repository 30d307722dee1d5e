"""Fixed photonic reservoirs used as nonlinear feature maps.

A reservoir projects the classical context onto ``m`` phases,

    phi = 2*pi * logistic(W @ x),

places them between two fixed Haar unitaries, ``U2 @ diag(exp(1j*phi)) @ U1``,
and returns the full Fock-basis output distribution of an ``n``-photon
input (one photon in each of the first ``n`` modes). Nothing in a
reservoir is trained; only the per-feature standardiser sees data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .optics import FockBasis, check_unitary, enumerate_fock_basis, output_distribution
from .stochastic import haar_unitary, make_rng, orthonormal_projection

__all__ = [
    "ReservoirSpec",
    "Reservoir",
    "ENSEMBLE",
    "SIMPLE_PML",
    "encode_phases",
    "reservoir_features",
    "ensemble_features",
    "simple_pml_features",
    "FeatureStandardizer",
    "QuantumReservoirFeatures",
]


@dataclass(frozen=True)
class ReservoirSpec:
    label: str
    modes: int
    photons: int
    sandwich: bool = True

    @property
    def seed_labels(self) -> tuple[str, str, str]:
        return f"{self.label}.U1", f"{self.label}.U2", f"{self.label}.W"


ENSEMBLE = (
    ReservoirSpec("R1", 12, 3),
    ReservoirSpec("R2", 10, 4),
    ReservoirSpec("R3", 16, 2),
)
# one (12, 3) reservoir without the second unitary; shares R1's draws
SIMPLE_PML = (ReservoirSpec("R1", 12, 3, sandwich=False),)


def encode_phases(W: np.ndarray, x) -> np.ndarray:
    """Phases in ``(0, 2*pi)`` from the projected context (rows or batch)."""
    return 2.0 * np.pi * expit(np.asarray(x, dtype=float) @ np.asarray(W).T)


@dataclass(frozen=True, eq=False)
class Reservoir:
    spec: ReservoirSpec
    U1: np.ndarray
    U2: np.ndarray | None
    W: np.ndarray
    input_state: tuple[int, ...]
    basis: FockBasis

    @classmethod
    def from_parts(cls, spec: ReservoirSpec, U1, U2, W, input_state=None) -> "Reservoir":
        m, n = spec.modes, spec.photons
        U1 = check_unitary(U1, atol=1e-12)
        if spec.sandwich:
            U2 = check_unitary(U2, atol=1e-12)
        else:
            U2 = None
        W = np.asarray(W, dtype=float)
        if U1.shape != (m, m) or (U2 is not None and U2.shape != (m, m)) or W.shape[0] != m:
            raise ValueError(f"reservoir parts do not match {m} modes")
        if input_state is None:
            input_state = (1,) * n + (0,) * (m - n)
        for arr in (U1, U2, W):
            if arr is not None:
                arr.setflags(write=False)
        return cls(spec, U1, U2, W, tuple(int(k) for k in input_state),
                   enumerate_fock_basis(m, n))

    @classmethod
    def from_seed(cls, spec: ReservoirSpec, master_seed: int, context_dim: int = 120) -> "Reservoir":
        if spec.photons > spec.modes:
            raise ValueError("the default input state needs photons <= modes")
        u1, u2, w = spec.seed_labels
        m = spec.modes
        U1 = haar_unitary(m, make_rng(master_seed, u1))
        U2 = haar_unitary(m, make_rng(master_seed, u2)) if spec.sandwich else None
        W = orthonormal_projection(m, context_dim, make_rng(master_seed, w))
        return cls.from_parts(spec, U1, U2, W)

    @property
    def n_features(self) -> int:
        return len(self.basis)

    def circuit(self, phases: np.ndarray) -> np.ndarray:
        ps = np.exp(1j * np.asarray(phases))
        if self.U2 is None:
            return self.U1 * ps  # U1 @ diag(ps)
        return (self.U2 * ps) @ self.U1

    def features(self, X) -> np.ndarray:
        """Output distributions for a batch of context rows, shape ``(N, D)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        phases = encode_phases(self.W, X)
        out = np.empty((X.shape[0], self.n_features))
        for i, phi in enumerate(phases):
            out[i] = output_distribution(self.circuit(phi), self.input_state, self.basis,
                                         check=False)
        return out


def reservoir_features(r: Reservoir, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = r.features(x)
    return out[0] if x.ndim == 1 else out


def ensemble_features(reservoirs, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.hstack([r.features(x) for r in reservoirs])
    return out[0] if x.ndim == 1 else out


def simple_pml_features(r: Reservoir, x) -> np.ndarray:
    """Single-unitary variant of ``reservoir_features`` (``U1 @ diag(e^{i phi})``).

    Note: with a Fock input and Fock-basis measurement, a phase layer on
    one side of a single unitary only contributes a global phase, so these
    features do not depend on ``x`` beyond rounding error.
    """
    if r.U2 is not None:
        r = Reservoir(ReservoirSpec(r.spec.label, r.spec.modes, r.spec.photons, sandwich=False),
                      r.U1, None, r.W, r.input_state, r.basis)
    return reservoir_features(r, x)


class FeatureStandardizer(TransformerMixin, BaseEstimator):
    """Per-feature z-scoring with population standard deviation.

    Features whose training spread is at most ``tol`` are treated as
    constant: their scale is set to 1, so they standardise to ~0.
    """

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def fit(self, Q, y=None):
        Q = check_array(Q, dtype=np.float64)
        if Q.shape[0] < 2:
            raise ValueError("standardiser needs at least 2 rows")
        self.n_features_in_ = Q.shape[1]
        self.mean_ = Q.mean(axis=0)
        std = Q.std(axis=0)
        self.constant_ = std <= self.tol
        self.scale_ = np.where(self.constant_, 1.0, std)
        return self

    def transform(self, Q):
        check_is_fitted(self, "mean_")
        Q = check_array(Q, dtype=np.float64)
        if Q.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {Q.shape[1]}")
        out = (Q - self.mean_) / self.scale_
        out[:, self.constant_] = 0.0
        return out


class QuantumReservoirFeatures(TransformerMixin, BaseEstimator):
    """Context -> ``[standardised reservoir features, raw context]``.

    Parameters
    ----------
    specs : sequence of ReservoirSpec
        Reservoirs to concatenate, in order. Defaults to the three-member
        ensemble (12,3), (10,4), (16,2) giving 364 + 715 + 136 = 1215 features.
    random_state : int
        Master seed for the unitaries and projections.
    include_context : bool
        Append the unstandardised context after the quantum block.
    """

    def __init__(self, specs=ENSEMBLE, random_state=42, include_context=True):
        self.specs = specs
        self.random_state = random_state
        self.include_context = include_context

    def raw_features(self, X) -> np.ndarray:
        X = check_array(X, dtype=np.float64)
        return np.hstack([r.features(X) for r in self.reservoirs_])

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.reservoirs_ = [Reservoir.from_seed(s, self.random_state, X.shape[1])
                            for s in self.specs]
        self.standardizer_ = FeatureStandardizer().fit(self.raw_features(X))
        return self

    def transform(self, X):
        check_is_fitted(self, "standardizer_")
        X = check_array(X, dtype=np.float64)
        q = self.standardizer_.transform(self.raw_features(X))
        return np.hstack([q, X]) if self.include_context else q

    @property
    def block_sizes(self) -> list[int]:
        return [r.n_features for r in self.reservoirs_]
