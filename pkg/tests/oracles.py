"""Independent reference computations used to freeze expected values.

Nothing here calls into the package's numerical paths: kernels are
evaluated point by point with ``math`` and linear systems are solved with an
explicit matrix inverse.
"""
import math

import numpy as np


def matern32_scalar(r, amplitude, lengthscale):
    s = math.sqrt(3.0) * r / lengthscale
    return amplitude * (1.0 + s) * math.exp(-s)


def gram(A, B, amplitude, lengthscale):
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            r = math.sqrt(sum((ai - bi) ** 2 for ai, bi in zip(a, b)))
            out[i, j] = matern32_scalar(r, amplitude, lengthscale)
    return out


def standardize(y):
    y = np.asarray(y, dtype=float)
    mean, std = y.mean(), y.std()
    if std < 1e-6:
        std = 1.0
    return (y - mean) / std, mean, std


def dense_posterior(X, y, Xq, amplitude, lengthscale, noise):
    """Posterior mean/variance by explicit inversion, on standardized and raw scales.

    ``noise`` is the total diagonal added to the Gram matrix (noise plus any
    jitter) on the standardized scale.
    """
    X, Xq = np.atleast_2d(X), np.atleast_2d(Xq)
    ys, mean, std = standardize(y)
    Kinv = np.linalg.inv(gram(X, X, amplitude, lengthscale) + noise * np.eye(len(X)))
    ks = gram(Xq, X, amplitude, lengthscale)
    mu_s = ks @ Kinv @ ys
    var_s = amplitude - np.einsum("ij,jk,ik->i", ks, Kinv, ks)
    return {
        "mean_std": mu_s,
        "var_std": var_s,
        "mean": mean + std * mu_s,
        "var": std**2 * var_s,
    }


def dense_lml(X, y, amplitude, lengthscale, noise):
    ys, _, _ = standardize(y)
    K = gram(X, X, amplitude, lengthscale) + noise * np.eye(len(ys))
    sign, logdet = np.linalg.slogdet(K)
    assert sign > 0
    return -0.5 * ys @ np.linalg.inv(K) @ ys - 0.5 * logdet - 0.5 * len(ys) * math.log(2 * math.pi)


def model_posterior(model, Xq):
    """Dense-solve posterior for an already fitted GPModel's data and hyperparameters."""
    y_raw = model.y * model.y_std + model.y_mean
    return dense_posterior(
        model.X, y_raw, Xq, model.kernel.amplitude, model.kernel.lengthscale,
        model.noise_var + model.jitter_used,
    )


def grid_argmax(values, grid):
    i = int(np.argmax(values))
    return grid[i], values[i]
