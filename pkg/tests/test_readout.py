import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ridge_by_descent
from qorc.readout import (
    RidgeReadout,
    compute_metrics,
    latent_mse,
    pooled_r2,
    ridge_objective,
    select_alpha,
    surface_rmse,
)


def _system(N, P, K=3, seed=0):
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(N, P)) + rng.normal(size=P)
    Z = F @ rng.normal(size=(P, K)) * 0.3 + rng.normal(size=(N, K)) + 2.0
    return F, Z


def test_exact_line_without_penalty():
    x = np.arange(10.0)[:, None]
    r = RidgeReadout(0.0).fit(x, 2 * x)
    np.testing.assert_allclose(r.coef_, [[2.0]], rtol=1e-12)
    np.testing.assert_allclose(r.intercept_, [0.0], atol=1e-12)


def test_huge_penalty_gives_mean_predictor():
    F, Z = _system(40, 5)
    r = RidgeReadout(1e12).fit(F, Z)
    assert np.abs(r.coef_).max() < 1e-7
    np.testing.assert_allclose(r.predict(F), np.broadcast_to(Z.mean(axis=0), Z.shape), atol=1e-5)


@pytest.mark.parametrize("N, P, alpha", [(50, 10, 1.0), (200, 300, 100.0)])
def test_matches_iterative_minimiser(N, P, alpha):
    F, Z = _system(N, P, seed=N)
    r = RidgeReadout(alpha).fit(F, Z)
    W, b = ridge_by_descent(F, Z, alpha)
    theta = np.hstack([r.coef_, r.intercept_[:, None]])
    ref = np.hstack([W, b[:, None]])
    assert np.abs(theta - ref).max() / np.abs(ref).max() <= 1e-6


@pytest.mark.parametrize("N, P", [(50, 10), (200, 300)])
def test_normal_equation_residual(N, P):
    F, Z = _system(N, P, seed=1)
    alpha = 10.0
    r = RidgeReadout(alpha).fit(F, Z)
    Fc, Zc = F - F.mean(axis=0), Z - Z.mean(axis=0)
    resid = (Fc.T @ Fc + alpha * np.eye(P)) @ r.coef_.T - Fc.T @ Zc
    scale = np.abs(Fc.T @ Zc).max()
    assert np.abs(resid).max() / scale <= 1e-8


def test_perturbation_does_not_lower_objective():
    F, Z = _system(60, 8, seed=2)
    alpha = 5.0
    r = RidgeReadout(alpha).fit(F, Z)
    best = ridge_objective(F, Z, r.coef_, r.intercept_, alpha)
    rng = np.random.default_rng(3)
    for _ in range(20):
        dW = 1e-4 * rng.normal(size=r.coef_.shape)
        db = 1e-4 * rng.normal(size=r.intercept_.shape)
        assert ridge_objective(F, Z, r.coef_ + dW, r.intercept_ + db, alpha) >= best


def test_predictions_for_zero_and_one_hot():
    F, Z = _system(30, 4, seed=4)
    r = RidgeReadout(1.0).fit(F, Z)
    np.testing.assert_allclose(r.predict(np.zeros(4)), r.intercept_)
    np.testing.assert_allclose(r.predict(np.eye(4)[2]), r.intercept_ + r.coef_[:, 2])


def test_input_validation():
    F, Z = _system(30, 4)
    r = RidgeReadout(1.0).fit(F, Z)
    with pytest.raises(ValueError, match="expected 4"):
        r.predict(np.zeros((2, 5)))
    with pytest.raises(ValueError):
        RidgeReadout(1.0).fit(F, Z[:10])
    with pytest.raises(ValueError):
        RidgeReadout(-1.0).fit(F, Z)


def test_singular_system_needs_penalty():
    F = np.random.default_rng(5).normal(size=(10, 30))
    Z = np.ones((10, 2))
    with pytest.raises(ValueError, match="alpha > 0"):
        RidgeReadout(0.0).fit(F, Z)
    RidgeReadout(1e-3).fit(F, Z)


def test_single_target_vector():
    F, Z = _system(30, 4)
    r = RidgeReadout(1.0).fit(F, Z[:, 0])
    assert r.predict(F).shape == (30, 1)


def test_select_alpha_returns_grid_member():
    F, Z = _system(80, 6, seed=6)
    alpha, scores = select_alpha(F[:60], Z[:60], F[60:], Z[60:])
    assert alpha in scores and scores[alpha] == min(scores.values())


def test_metrics():
    Z = np.random.default_rng(7).normal(size=(6, 20))
    assert latent_mse(Z, Z) == 0.0 and pooled_r2(Z, Z) == 1.0
    mean = np.full_like(Z, Z.mean())
    assert pooled_r2(mean, Z) == pytest.approx(0.0, abs=1e-12)
    assert pooled_r2(-Z, Z) < 0.0
    np.testing.assert_allclose(latent_mse(Z + 1.0, Z), 20.0)
    np.testing.assert_allclose(surface_rmse(Z + 0.5, Z), 0.5)
    rep = compute_metrics(Z, Z, Z + 1, Z)
    assert rep.per_day_rmse == [1.0] * 6 and rep.n_samples == 6
    with pytest.raises(ValueError):
        compute_metrics(Z, Z[:3], Z, Z)
    with pytest.raises(ValueError):
        surface_rmse(np.empty(0), np.empty(0))


@settings(max_examples=20, deadline=None)
@given(st.integers(5, 40), st.integers(1, 12), st.floats(1e-2, 1e3))
def test_translation_of_targets_moves_intercept_only(N, P, alpha):
    F, Z = _system(N, P, K=2, seed=N * 13 + P)
    a = RidgeReadout(alpha).fit(F, Z)
    b = RidgeReadout(alpha).fit(F, Z + 7.0)
    np.testing.assert_allclose(a.coef_, b.coef_, atol=1e-9)
    np.testing.assert_allclose(b.intercept_ - a.intercept_, 7.0, rtol=1e-9)
