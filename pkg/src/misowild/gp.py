"""Gaussian process regression with a Matern 3/2 kernel.

Inputs live on the unit hypercube and outputs are standardized before
fitting, so the hyperparameter bounds below are scale-free. Predictions are
returned on the original output scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from numba import njit
from scipy.spatial.distance import cdist

from .errors import IllConditioned
from .sampling import lhs_sample
from .simplex import minimize_batch

SQRT3 = np.sqrt(3.0)
LOG_2PI = np.log(2.0 * np.pi)

JITTER_LADDER = tuple(10.0**p for p in range(-10, -3))  # 1e-10 ... 1e-4
NOISE_FLOOR = 1e-8
# A jittered solve whose residual against the un-jittered system exceeds this
# fraction of |y| is treated as a failed factorization.
RESIDUAL_TOL = 0.1
MIN_STD = np.sqrt(1e-12)

AMPLITUDE_BOUNDS = (1e-3, 1e3)
LENGTHSCALE_BOUNDS = (1e-2, 10.0)
NOISE_BOUNDS = (NOISE_FLOOR, 1.0)

DEFAULT_AMPLITUDE = 1.0
DEFAULT_LENGTHSCALE = 0.2
DEFAULT_NOISE_START = 1e-3


@dataclass(frozen=True)
class KernelParams:
    amplitude: float
    lengthscale: float

    def __post_init__(self):
        if not (self.amplitude > 0 and self.lengthscale > 0):
            raise ValueError("amplitude and lengthscale must be positive")


def matern32(r, params: KernelParams):
    """Matern 3/2 covariance as a function of distance ``r``."""
    s = SQRT3 * np.asarray(r, dtype=float) / params.lengthscale
    out = params.amplitude * (1.0 + s) * np.exp(-s)
    return float(out) if out.ndim == 0 else out


def _as_2d(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(np.mean(y))
    std = float(np.std(y))
    if std < MIN_STD:
        std = 1.0
    return (y - mean) / std, mean, std


@dataclass(frozen=True, eq=False)
class GPModel:
    """A fitted GP. Immutable; every array is owned by the model."""

    X: np.ndarray
    y: np.ndarray  # standardized targets
    kernel: KernelParams
    noise_var: float  # on the standardized scale
    chol: np.ndarray
    alpha: np.ndarray
    y_mean: float
    y_std: float
    jitter_used: float

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def _query(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return x, False
        if x.ndim == 0 or (x.ndim == 1 and x.shape[0] == self.dim):
            return x.reshape(1, self.dim), True
        if self.dim == 1 and x.ndim == 1:
            return x[:, None], False
        raise ValueError(f"query of shape {x.shape} does not match dimension {self.dim}")

    def predict_mean(self, x):
        Xq, single = self._query(x)
        Ks = matern32(cdist(Xq, self.X), self.kernel)
        mean = self.y_mean + self.y_std * (Ks @ self.alpha)
        return float(mean[0]) if single else mean

    def predict(self, x):
        """Posterior mean and variance of the latent function at ``x``.

        ``x`` is a single location of shape ``(d,)`` (scalars returned) or a
        batch of shape ``(m, d)``.
        """
        Xq, single = self._query(x)
        Ks = matern32(cdist(Xq, self.X), self.kernel)
        mean = Ks @ self.alpha
        v = solve_triangular(self.chol, Ks.T, lower=True, check_finite=False)
        var = self.kernel.amplitude - np.einsum("ij,ij->j", v, v)
        var = np.maximum(var, 0.0)
        mean = self.y_mean + self.y_std * mean
        var = var * self.y_std**2
        if single:
            return float(mean[0]), float(var[0])
        return mean, var

    def log_marginal_likelihood(self) -> float:
        """Gaussian log evidence of the standardized targets."""
        return float(
            -0.5 * self.y @ self.alpha
            - np.sum(np.log(np.diag(self.chol)))
            - 0.5 * self.n * LOG_2PI
        )


def predict(model: GPModel, x):
    return model.predict(x)


def log_marginal_likelihood(model: GPModel) -> float:
    return model.log_marginal_likelihood()


def _factorize(K: np.ndarray, noise_var: float, y: np.ndarray):
    """Cholesky of ``K + noise_var*I`` with an escalating diagonal jitter."""
    n = K.shape[0]
    Kn = K + noise_var * np.eye(n)
    ynorm = np.linalg.norm(y)
    for jitter in JITTER_LADDER:
        try:
            L = np.linalg.cholesky(Kn + jitter * np.eye(n))
        except np.linalg.LinAlgError:
            continue
        alpha = cho_solve((L, True), y, check_finite=False)
        if not np.all(np.isfinite(alpha)):
            continue
        if ynorm > 0 and np.linalg.norm(Kn @ alpha - y) > RESIDUAL_TOL * ynorm:
            continue
        return L, alpha, jitter
    raise IllConditioned(
        f"covariance of {n} points not factorizable up to jitter {JITTER_LADDER[-1]:g}"
    )


def _fit_standardized(X, ys, y_mean, y_std, noise_var, kernel) -> GPModel:
    K = matern32(cdist(X, X), kernel)
    L, alpha, jitter = _factorize(K, noise_var, ys)
    return GPModel(
        X=X, y=ys, kernel=kernel, noise_var=float(noise_var), chol=L, alpha=alpha,
        y_mean=y_mean, y_std=y_std, jitter_used=jitter,
    )


def fit_gp(X, y, noise_var: float, kernel: KernelParams) -> GPModel:
    """Condition a GP with fixed hyperparameters on ``(X, y)``.

    ``noise_var`` is expressed on the standardized output scale.
    Raises :class:`IllConditioned` if no jitter on the ladder gives a usable
    factorization (typically duplicate inputs with contradictory targets and
    no noise).
    """
    X = _as_2d(X).copy()
    y = np.asarray(y, dtype=float).reshape(-1).copy()
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y must have the same, non-zero length")
    if noise_var < 0:
        raise ValueError("noise_var must be non-negative")
    ys, y_mean, y_std = _standardize(y)
    return _fit_standardized(X, ys, y_mean, y_std, noise_var, kernel)


def _log_bounds(learn_noise: bool) -> tuple[np.ndarray, np.ndarray]:
    bounds = [AMPLITUDE_BOUNDS, LENGTHSCALE_BOUNDS] + ([NOISE_BOUNDS] if learn_noise else [])
    b = np.log(np.array(bounds))
    return b[:, 0], b[:, 1]


@njit(cache=True)
def _neg_lml_one(amp, ell, noise, D, ys, ladder):
    n = D.shape[0]
    K = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            s = SQRT3 * D[i, j] / ell
            K[i, j] = amp * (1.0 + s) * np.exp(-s)
    L = np.empty((n, n))
    for jitter in ladder:
        ok = True
        for j in range(n):
            acc = K[j, j] + noise + jitter
            for k in range(j):
                acc -= L[j, k] * L[j, k]
            if not acc > 0.0:
                ok = False
                break
            L[j, j] = np.sqrt(acc)
            for i in range(j + 1, n):
                acc = K[i, j]
                for k in range(j):
                    acc -= L[i, k] * L[j, k]
                L[i, j] = acc / L[j, j]
        if ok:
            quad = 0.0
            logdet = 0.0
            z = np.empty(n)
            for i in range(n):
                acc = ys[i]
                for k in range(i):
                    acc -= L[i, k] * z[k]
                z[i] = acc / L[i, i]
                quad += z[i] * z[i]
                logdet += np.log(L[i, i])
            return 0.5 * quad + logdet + 0.5 * n * LOG_2PI
    return np.inf


@njit(cache=True)
def _batch_neg_lml(theta, D, ys, fixed_noise, ladder):
    """Negative log marginal likelihood for a stack of log-hyperparameters.

    A negative ``fixed_noise`` means the noise variance is the third column.
    """
    m = theta.shape[0]
    out = np.empty(m)
    for r in range(m):
        noise = np.exp(theta[r, 2]) if fixed_noise < 0.0 else fixed_noise
        out[r] = _neg_lml_one(np.exp(theta[r, 0]), np.exp(theta[r, 1]), noise, D, ys, ladder)
    return out


def mle_fit(X, y, noise_var: float | None = None, *, seed=0, n_starts: int = 10,
            maxiter: int = 200) -> GPModel:
    """Fit kernel hyperparameters (and noise, unless fixed) by maximum likelihood.

    The search runs a bounded simplex descent on log-hyperparameters from one
    default start plus ``n_starts - 1`` Latin hypercube starts. The returned
    model has a log marginal likelihood at least as high as that of every
    start point; ties go to the lowest start index.

    With fewer than two points the default hyperparameters are used as-is.
    """
    X = _as_2d(X).copy()
    y = np.asarray(y, dtype=float).reshape(-1).copy()
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y must have the same, non-zero length")
    learn_noise = noise_var is None
    default_noise = NOISE_FLOOR if learn_noise else float(noise_var)
    default_kernel = KernelParams(DEFAULT_AMPLITUDE, DEFAULT_LENGTHSCALE)
    ys, y_mean, y_std = _standardize(y)
    if X.shape[0] < 2:
        return _fit_standardized(X, ys, y_mean, y_std, default_noise, default_kernel)

    lo, hi = _log_bounds(learn_noise)
    default = [np.log(DEFAULT_AMPLITUDE), np.log(DEFAULT_LENGTHSCALE)]
    if learn_noise:
        default.append(np.log(DEFAULT_NOISE_START))
    starts = np.vstack([default, lo + (hi - lo) * lhs_sample(n_starts - 1, len(lo), seed)])

    D = cdist(X, X)
    fixed = None if learn_noise else float(noise_var)
    ladder = np.array(JITTER_LADDER)
    finals, _ = minimize_batch(
        lambda th: _batch_neg_lml(th, D, ys, -1.0 if fixed is None else fixed, ladder),
        starts, lo, hi, step=0.1 * (hi - lo), maxiter=maxiter,
    )

    best, best_lml, error = None, -np.inf, None
    # finals[i] first, then starts[i], so each restart is judged by its best point.
    for theta in np.stack([finals, starts], axis=1).reshape(-1, len(lo)):
        kernel = KernelParams(float(np.exp(theta[0])), float(np.exp(theta[1])))
        noise = float(np.exp(theta[2])) if learn_noise else fixed
        try:
            model = _fit_standardized(X, ys, y_mean, y_std, noise, kernel)
        except IllConditioned as exc:
            error = exc
            continue
        lml = model.log_marginal_likelihood()
        if lml > best_lml:
            best, best_lml = model, lml
    if best is None:
        raise error
    return best
