"""Seeded random streams.

Every random quantity in the pipeline comes from a generator keyed by a
``(master_seed, label)`` pair. The sub-seed is the first 8 bytes
(little-endian) of ``blake2b(f"{master_seed}:{label}")`` and feeds numpy's
PCG64 bit generator, so streams are reproducible across platforms and do
not depend on the order in which consumers ask for them.

Labels in use: ``R1.U1``, ``R1.U2``, ``R1.W`` (per reservoir), ``ae.init``,
``ae.shuffle.epoch{E}``, ``ae.mask.epoch{E}.batch{B}`` and ``synthetic``.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = [
    "derive_seed",
    "make_rng",
    "haar_unitary",
    "orthonormal_projection",
    "bernoulli_mask",
]


def derive_seed(master_seed: int, label: str) -> int:
    digest = hashlib.blake2b(f"{int(master_seed)}:{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(master_seed: int, label: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, label)))


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary.

    QR of a complex Ginibre matrix, with the columns of Q rescaled by the
    phases of diag(R) so the result is invariant rather than merely unitary.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def orthonormal_projection(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Real ``rows x cols`` matrix with orthonormal rows."""
    if rows > cols:
        raise ValueError(f"cannot fit {rows} orthonormal rows in dimension {cols}")
    g = rng.standard_normal((cols, rows))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return np.ascontiguousarray(q.T)


def bernoulli_mask(shape, keep_prob: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError(f"keep_prob must lie in [0, 1], got {keep_prob}")
    return (rng.random(shape) < keep_prob).astype(float)
