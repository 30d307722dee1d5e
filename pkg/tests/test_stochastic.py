import numpy as np
import pytest

from qorc.stochastic import (
    bernoulli_mask,
    derive_seed,
    haar_unitary,
    make_rng,
    orthonormal_projection,
)


def test_derive_seed_is_stable_and_label_sensitive():
    # frozen value: changing the derivation silently would change every reservoir
    assert derive_seed(42, "R1.U1") == int.from_bytes(
        __import__("hashlib").blake2b(b"42:R1.U1", digest_size=8).digest(), "little")
    assert derive_seed(42, "R1.U1") != derive_seed(42, "R1.U2")
    assert derive_seed(42, "R1.U1") != derive_seed(43, "R1.U1")
    assert 0 <= derive_seed(7, "x") < 2**64


def test_haar_u1_is_a_phase():
    u = haar_unitary(1, make_rng(1, "a"))
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1.0) <= 1e-12


def test_haar_deterministic():
    a = haar_unitary(12, make_rng(42, "R1.U1"))
    b = haar_unitary(12, make_rng(42, "R1.U1"))
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("m", [2, 10, 12, 16])
def test_haar_unitarity(m):
    rng = make_rng(0, f"unitarity{m}")
    for _ in range(100):
        U = haar_unitary(m, rng)
        assert np.abs(U.conj().T @ U - np.eye(m)).max() <= 1e-12


def test_haar_first_moment():
    # E|U_11|^2 = 1/m under the Haar measure
    m, draws = 12, 1000
    rng = make_rng(3, "moment")
    vals = np.array([abs(haar_unitary(m, rng)[0, 0]) ** 2 for _ in range(draws)])
    se = vals.std(ddof=1) / np.sqrt(draws)
    assert abs(vals.mean() - 1 / m) <= 3 * se


def test_haar_phase_correction_makes_diagonal_phase_uniform():
    # without the R-phase fix, QR's convention biases the diagonal towards real positive
    rng = make_rng(5, "phase")
    angles = np.array([np.angle(haar_unitary(3, rng)[0, 0]) for _ in range(2000)])
    assert abs(np.mean(np.cos(angles))) < 0.1


def test_projection_orthonormal():
    rng = make_rng(0, "W")
    for _ in range(100):
        W = orthonormal_projection(16, 120, rng)
        assert np.abs(W @ W.T - np.eye(16)).max() <= 1e-12
    w = orthonormal_projection(1, 120, rng)
    assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)


def test_projection_determinism_and_errors():
    a = orthonormal_projection(10, 120, make_rng(42, "R2.W"))
    b = orthonormal_projection(10, 120, make_rng(42, "R2.W"))
    assert a.tobytes() == b.tobytes()
    with pytest.raises(ValueError):
        orthonormal_projection(121, 120, make_rng(0, "x"))


def test_bernoulli_mask():
    rng = make_rng(0, "mask")
    assert bernoulli_mask(224, 1.0, rng).min() == 1.0
    assert bernoulli_mask(224, 0.0, rng).max() == 0.0
    means = [bernoulli_mask(224, 0.85, rng).mean() for _ in range(10_000)]
    assert 0.84 <= np.mean(means) <= 0.86
    assert set(np.unique(bernoulli_mask(1000, 0.5, rng))) == {0.0, 1.0}
    with pytest.raises(ValueError):
        bernoulli_mask(3, 1.5, rng)
