"""Fock-basis simulation of linear-optical interferometers.

Output probabilities of a passive interferometer ``U`` acting on a Fock
input ``s`` are

    p(t) = |perm(U[t, s])|**2 / (prod(s!) * prod(t!))

where ``U[t, s]`` repeats row ``i`` of ``U`` ``t_i`` times (output side) and
column ``j`` ``s_j`` times (input side).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

__all__ = [
    "FockBasis",
    "fock_dimension",
    "enumerate_fock_basis",
    "permanent",
    "batch_permanent",
    "output_distribution",
    "MAX_BASIS_SIZE",
    "MAX_PERMANENT_SIZE",
]

MAX_BASIS_SIZE = 10_000
MAX_PERMANENT_SIZE = 12
_INT64_MAX = 2**63 - 1


def fock_dimension(m: int, n: int) -> int:
    """Number of ways to place ``n`` indistinguishable photons in ``m`` modes."""
    if m < 1:
        raise ValueError(f"mode count must be >= 1, got {m}")
    if n < 0:
        raise ValueError(f"photon count must be >= 0, got {n}")
    dim = comb(n + m - 1, n)
    if dim > _INT64_MAX:
        raise OverflowError(f"Fock dimension for m={m}, n={n} exceeds int64")
    return dim


def _occupations(m: int, n: int):
    # descending first entry gives reverse-lexicographic order
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _occupations(m - 1, n - first):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """All ``n``-photon occupation vectors over ``m`` modes.

    States are held as rows of ``states`` in reverse-lexicographic order,
    e.g. for ``m=3, n=2``: (2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2).
    This order fixes the column layout of every feature vector built on it.
    """

    m: int
    n: int
    states: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.states.shape[0]

    def index(self, occupation: Sequence[int]) -> int:
        hits = np.flatnonzero((self.states == np.asarray(occupation)).all(axis=1))
        if hits.size == 0:
            raise KeyError(tuple(occupation))
        return int(hits[0])

    @property
    def mode_lists(self) -> np.ndarray:
        """``(D, n)`` array listing the occupied mode of every photon, per state."""
        return _mode_lists(self.m, self.n)

    @property
    def factorial_norms(self) -> np.ndarray:
        """``prod_i t_i!`` for every state ``t``."""
        return _factorial_norms(self.m, self.n)


def enumerate_fock_basis(m: int, n: int, max_size: int = MAX_BASIS_SIZE) -> FockBasis:
    dim = fock_dimension(m, n)
    if dim > max_size:
        raise ValueError(
            f"Fock basis for m={m}, n={n} has {dim} states, above the cap of {max_size}"
        )
    return FockBasis(m, n, _basis_states(m, n))


@lru_cache(maxsize=None)
def _basis_states(m: int, n: int) -> np.ndarray:
    states = np.array(list(_occupations(m, n)), dtype=np.int64).reshape(-1, m)
    states.setflags(write=False)
    return states


@lru_cache(maxsize=None)
def _mode_lists(m: int, n: int) -> np.ndarray:
    states = _basis_states(m, n)
    out = np.array([np.repeat(np.arange(m), row) for row in states], dtype=np.int64)
    out = out.reshape(len(states), n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _factorial_norms(m: int, n: int) -> np.ndarray:
    states = _basis_states(m, n)
    out = np.array([np.prod([factorial(int(k)) for k in row]) for row in states], dtype=float)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _gray_schedule(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column flipped, add/remove direction and subset sign for each Gray step."""
    steps = np.arange(1, 2**n)
    gray = steps ^ (steps >> 1)
    prev = (steps - 1) ^ ((steps - 1) >> 1)
    changed = gray ^ prev
    cols = np.array([int(c).bit_length() - 1 for c in changed])
    adding = (gray & changed) != 0
    popcount = np.array([bin(int(g)).count("1") for g in gray])
    signs = np.where(popcount % 2 == n % 2, 1.0, -1.0)
    return cols, adding, signs


def permanent(A, max_size: int = MAX_PERMANENT_SIZE) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code subset ordering.

    Each Gray step toggles one column in or out of the running row sums, so
    the cost is ``O(2**n * n)``. Returns 1 for the empty matrix.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > max_size:
        raise ValueError(f"matrix size {n} exceeds the permanent cap of {max_size}")
    if n == 0:
        return 1.0 + 0.0j
    cols, adding, signs = _gray_schedule(n)
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    for col, add, sign in zip(cols, adding, signs):
        if add:
            row_sums += A[:, col]
        else:
            row_sums -= A[:, col]
        total += sign * np.prod(row_sums)
    return complex(total)


def batch_permanent(A: np.ndarray) -> np.ndarray:
    """Ryser permanents of a stack of ``(k, n, n)`` matrices, vectorised over ``k``."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected a (k, n, n) stack, got shape {A.shape}")
    k, n, _ = A.shape
    if n == 0:
        return np.ones(k, dtype=complex)
    cols, adding, signs = _gray_schedule(n)
    row_sums = np.zeros((k, n), dtype=complex)
    total = np.zeros(k, dtype=complex)
    for col, add, sign in zip(cols, adding, signs):
        if add:
            row_sums += A[:, :, col]
        else:
            row_sums -= A[:, :, col]
        total += sign * np.prod(row_sums, axis=1)
    return total


def check_unitary(U: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"unitary must be square, got shape {U.shape}")
    err = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
    if err > atol:
        raise ValueError(f"matrix is not unitary: max |U^H U - I| = {err:.3e}")
    return U


def output_distribution(U, input_state: Sequence[int], basis: FockBasis,
                        check: bool = True) -> np.ndarray:
    """Probability of every state in ``basis`` after ``U`` acts on ``input_state``."""
    U = check_unitary(U) if check else np.asarray(U, dtype=complex)
    s = np.asarray(input_state, dtype=np.int64)
    if s.shape != (basis.m,):
        raise ValueError(f"input state has {s.size} modes, basis has {basis.m}")
    if U.shape[0] != basis.m:
        raise ValueError(f"unitary acts on {U.shape[0]} modes, basis has {basis.m}")
    if (s < 0).any() or s.sum() != basis.n:
        raise ValueError(f"input state {tuple(s)} does not hold {basis.n} photons")

    in_modes = np.repeat(np.arange(basis.m), s)
    in_norm = float(np.prod([factorial(int(k)) for k in s]))
    # (D, n, n): rows from output occupations, columns from input occupations
    sub = U[:, in_modes][basis.mode_lists]
    amps = batch_permanent(sub)
    return (amps.real**2 + amps.imag**2) / (basis.factorial_norms * in_norm)
