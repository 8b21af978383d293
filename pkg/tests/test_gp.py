import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from misowild.errors import IllConditioned
from misowild.gp import (
    JITTER_LADDER,
    KernelParams,
    fit_gp,
    log_marginal_likelihood,
    matern32,
    mle_fit,
    predict,
)
from misowild.space import SearchSpace

from oracles import dense_lml, dense_posterior, matern32_scalar


# matern32 ------------------------------------------------------------------

def test_matern_at_zero_is_amplitude():
    assert matern32(0.0, KernelParams(2.0, 0.5)) == 2.0


def test_matern_unit_distance():
    # (1 + sqrt 3) exp(-sqrt 3) at 30 digits with mpmath: 0.483357724596507650595...
    expected = matern32_scalar(1.0, 1.0, 1.0)
    assert expected == pytest.approx(0.48335772459650765, abs=1e-15)
    assert matern32(1.0, KernelParams(1.0, 1.0)) == pytest.approx(expected, rel=1e-14)


def test_matern_far_field_vanishes():
    assert matern32(1e6, KernelParams(1.0, 1.0)) < 1e-300


def test_matern_monotone_on_sorted_distances():
    r = np.sort(np.random.default_rng(1).uniform(0, 20, 1000))
    k = matern32(r, KernelParams(1.3, 0.7))
    assert np.all(np.diff(k) <= 0)
    assert np.all(k > 0)


@pytest.mark.parametrize("amp,ell", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
def test_kernel_params_must_be_positive(amp, ell):
    with pytest.raises(ValueError):
        KernelParams(amp, ell)


# search space --------------------------------------------------------------

@given(st.lists(st.floats(0, 1), min_size=2, max_size=2))
def test_search_space_round_trip(u):
    space = SearchSpace((-5.0, 0.0), (10.0, 15.0))
    assert np.allclose(space.normalize(space.denormalize(u)), u, atol=1e-12)


def test_search_space_rejects_empty_box():
    with pytest.raises(ValueError):
        SearchSpace((0.0,), (0.0,))


# fit / predict -------------------------------------------------------------

def test_single_point_noiseless_interpolation():
    model = fit_gp([[0.3]], [5.0], 0.0, KernelParams(1.0, 0.2))
    mean, var = predict(model, [0.3])
    assert mean == pytest.approx(5.0, abs=1e-12)
    # the first jitter rung (1e-10) is the whole residual variance, up to round-off
    assert var <= 1e-10 * (1 + 1e-6)


def test_contradictory_duplicates_are_ill_conditioned():
    with pytest.raises(IllConditioned):
        fit_gp([[0.5], [0.5]], [1.0, 2.0], 0.0, KernelParams(1.0, 0.2))


def test_consistent_duplicates_fit():
    model = fit_gp([[0.5], [0.5]], [1.0, 1.0], 0.0, KernelParams(1.0, 0.2))
    assert predict(model, [0.5])[0] == pytest.approx(1.0)


def test_two_point_closed_form():
    model = fit_gp([[0.0], [1.0]], [0.0, 1.0], 0.0, KernelParams(1.0, 1.0))
    # Standardized targets are (-1, 1); by symmetry the mean at 0.5 is the data
    # mean, and k* = kappa (1, 1) is an eigenvector of K with eigenvalue 1 + rho.
    rho = (1 + math.sqrt(3)) * math.exp(-math.sqrt(3))
    kappa = (1 + math.sqrt(3) / 2) * math.exp(-math.sqrt(3) / 2)
    expected_var = 0.25 * (1 - 2 * kappa**2 / (1 + rho))
    mean, var = predict(model, [0.5])
    assert mean == pytest.approx(0.5, abs=1e-12)
    assert var == pytest.approx(expected_var, rel=1e-8)


def test_random_instance_matches_dense_oracle():
    rng = np.random.default_rng(7)
    X = rng.random((5, 1))
    y = rng.normal(size=5)
    kernel = KernelParams(1.4, 0.3)
    model = fit_gp(X, y, 1e-3, kernel)
    Xq = rng.random((20, 1))
    ref = dense_posterior(X, y, Xq, 1.4, 0.3, 1e-3 + model.jitter_used)
    mean, var = model.predict(Xq)
    assert np.max(np.abs(mean - ref["mean"])) <= 1e-8
    assert np.max(np.abs(var - ref["var"])) <= 1e-8


def test_far_field_recovers_prior():
    X = np.array([[0.0], [0.02], [0.05]])
    y = np.array([1.0, 3.0, 2.0])
    model = fit_gp(X, y, 1e-6, KernelParams(2.0, 0.01))
    mean, var = model.predict([1.0])
    assert mean == pytest.approx(model.y_mean, rel=1e-6)
    assert var == pytest.approx(2.0 * model.y_std**2, rel=1e-6)


def test_cholesky_reconstructs_jittered_covariance():
    rng = np.random.default_rng(3)
    X = rng.random((6, 2))
    model = fit_gp(X, rng.normal(size=6), 1e-4, KernelParams(0.8, 0.4))
    K = matern32(np.linalg.norm(X[:, None] - X[None], axis=-1), model.kernel)
    target = K + (model.noise_var + model.jitter_used) * np.eye(6)
    err = np.linalg.norm(model.chol @ model.chol.T - target) / np.linalg.norm(target)
    assert err <= 1e-8
    assert model.jitter_used in JITTER_LADDER


def test_batch_and_single_predictions_agree():
    rng = np.random.default_rng(4)
    model = fit_gp(rng.random((6, 2)), rng.normal(size=6), 1e-3, KernelParams(1.0, 0.3))
    Xq = rng.random((4, 2))
    mean, var = model.predict(Xq)
    for i, x in enumerate(Xq):
        m, v = model.predict(x)
        assert m == pytest.approx(mean[i], abs=1e-12)
        assert v == pytest.approx(var[i], abs=1e-12)
    assert np.allclose(model.predict_mean(Xq), mean, atol=1e-12)


def test_mismatched_lengths_rejected():
    with pytest.raises(ValueError):
        fit_gp([[0.1], [0.2]], [1.0], 0.0, KernelParams(1.0, 0.2))


@st.composite
def gp_instances(draw):
    n = draw(st.integers(1, 8))
    d = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return (rng.random((n, d)), rng.normal(size=n) * draw(st.sampled_from([1e-2, 1.0, 50.0])),
            rng.random((5, d)), KernelParams(draw(st.floats(0.1, 5.0)), draw(st.floats(0.05, 2.0))),
            draw(st.floats(1e-6, 1e-1)))


@settings(max_examples=60, deadline=None)
@given(gp_instances())
def test_prediction_matches_oracle_property(inst):
    X, y, Xq, kernel, noise = inst
    model = fit_gp(X, y, noise, kernel)
    ref = dense_posterior(X, y, Xq, kernel.amplitude, kernel.lengthscale,
                          noise + model.jitter_used)
    mean, var = model.predict(Xq)
    assert np.allclose((mean - model.y_mean) / model.y_std, ref["mean_std"], atol=1e-8)
    assert np.allclose(var / model.y_std**2, ref["var_std"], atol=1e-8)
    # variance bounds
    assert np.all(var >= 0)
    assert np.all(var <= kernel.amplitude * model.y_std**2 + 1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_noiseless_interpolation_property(seed, d):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    X = rng.random((n, d))
    y = rng.normal(size=n) * 3
    # keep points well separated relative to the lengthscale
    model = fit_gp(X, y, 0.0, KernelParams(1.0, 0.05))
    mean, var = model.predict(X)
    assert np.all(np.abs(mean - y) <= 1e-6 * (1 + np.abs(y)))
    assert np.all(var <= 1e-8 * model.y_std**2 + 1e-12)


# log marginal likelihood ---------------------------------------------------

def test_lml_scalar_closed_form():
    model = fit_gp([[0.3]], [5.0], 0.0, KernelParams(1.0, 0.2))
    assert log_marginal_likelihood(model) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-9)
    assert log_marginal_likelihood(model) == pytest.approx(-0.918939, abs=1e-6)


def test_lml_permutation_invariant():
    rng = np.random.default_rng(11)
    X, y = rng.random((6, 2)), rng.normal(size=6)
    kernel = KernelParams(1.2, 0.5)
    perm = rng.permutation(6)
    a = fit_gp(X, y, 1e-2, kernel).log_marginal_likelihood()
    b = fit_gp(X[perm], y[perm], 1e-2, kernel).log_marginal_likelihood()
    assert a == pytest.approx(b, abs=1e-10)


def test_lml_matches_dense_oracle():
    rng = np.random.default_rng(12)
    X, y = rng.random((4, 1)), rng.normal(size=4)
    model = fit_gp(X, y, 1e-2, KernelParams(0.9, 0.25))
    ref = dense_lml(X, y, 0.9, 0.25, 1e-2 + model.jitter_used)
    assert model.log_marginal_likelihood() == pytest.approx(ref, abs=1e-8)


# MLE -----------------------------------------------------------------------

def test_mle_with_one_point_uses_defaults():
    model = mle_fit([[0.4]], [2.0])
    assert model.kernel == KernelParams(1.0, 0.2)
    assert model.noise_var == 1e-8
    assert model.predict([0.4])[0] == pytest.approx(2.0)


@pytest.mark.parametrize("seed", range(8))
def test_mle_never_worse_than_default_start(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 15))
    X, y = rng.random((n, 2)), rng.normal(size=n)
    fitted = mle_fit(X, y, seed=seed).log_marginal_likelihood()
    default = fit_gp(X, y, 1e-3, KernelParams(1.0, 0.2)).log_marginal_likelihood()
    assert fitted >= default - 1e-12


def test_mle_is_deterministic():
    rng = np.random.default_rng(5)
    X, y = rng.random((10, 1)), rng.normal(size=10)
    a, b = mle_fit(X, y, seed=3), mle_fit(X, y, seed=3)
    assert a.kernel == b.kernel and a.noise_var == b.noise_var
    assert np.array_equal(a.alpha, b.alpha)


def test_mle_fixed_noise_is_respected():
    rng = np.random.default_rng(6)
    X, y = rng.random((8, 1)), rng.normal(size=8)
    assert mle_fit(X, y, noise_var=0.05).noise_var == 0.05


def test_mle_constant_targets():
    X = np.linspace(0, 1, 6)[:, None]
    model = mle_fit(X, np.full(6, 3.25))
    assert model.y_std == 1.0
    mean = model.predict_mean(np.random.default_rng(0).random((10, 1)))
    assert np.allclose(mean, 3.25, atol=1e-6)


def test_mle_duplicate_location_is_absorbed_by_noise_floor():
    X = np.array([[0.2], [0.5], [0.5], [0.9]])
    model = mle_fit(X, [0.0, 1.0, 1.3, -0.5])
    assert model.noise_var >= 1e-8
    assert np.isfinite(model.log_marginal_likelihood())


def test_mle_recovers_lengthscale_on_average():
    # 30 points from a GP with amplitude 1 and lengthscale 0.3, 20 seeds
    true_ell = 0.3
    logs = []
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        X = np.sort(rng.random(30))[:, None]
        K = matern32(np.abs(X - X.T), KernelParams(1.0, true_ell)) + 1e-8 * np.eye(30)
        y = np.linalg.cholesky(K) @ rng.standard_normal(30)
        logs.append(math.log(mle_fit(X, y, seed=seed).kernel.lengthscale))
    assert abs(np.mean(logs) - math.log(true_ell)) <= 0.7
