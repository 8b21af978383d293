"""Cost- and discrepancy-penalized confidence-bound acquisition over (source, location)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .agp import AugmentedModel
from .models import SourceState
from .sampling import lhs_sample
from .simplex import minimize_batch

N_STARTS = 20
MAXITER = 100
DELTA_CONF = 0.1


@dataclass(frozen=True, eq=False)
class AcquisitionContext:
    agp: AugmentedModel
    sources: Sequence[SourceState]
    beta: float
    delta_min: float
    iteration: int
    seed: int = 0
    # Divisors applied to each source's cost bound (all ones = raw costs).
    cost_scales: tuple[float, ...] | None = None
    n_starts: int = N_STARTS
    maxiter: int = MAXITER

    @property
    def dim(self) -> int:
        return self.agp.X.shape[1]


@dataclass(frozen=True)
class Candidate:
    source_id: int
    location: tuple[float, ...]
    value: float
    corrected: bool = False


def default_delta_min(d: int) -> float:
    return 1e-3 * np.sqrt(d)


def beta_schedule(t: int, d: int, delta_conf: float = DELTA_CONF) -> float:
    """Exploration weight at iteration ``t``: ``2 log(d t^2 pi^2 / (6 delta))``."""
    if t < 1:
        raise ValueError("iteration index starts at 1")
    return 2.0 * np.log(d * t**2 * np.pi**2 / (6.0 * delta_conf))


def acquisition_batch(ctx: AcquisitionContext, s: int, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    state = ctx.sources[s - 1]
    mu, var = ctx.agp.model.predict(X)
    improvement = ctx.agp.incumbent_value - (mu - np.sqrt(ctx.beta) * np.sqrt(var))
    cost = state.cost_ucb(X)
    if ctx.cost_scales is not None:
        cost = cost / ctx.cost_scales[s - 1]
    eta = np.abs(mu - state.value_model.predict_mean(X))
    return improvement / (1.0 + cost * eta)


def acquisition_value(ctx: AcquisitionContext, s: int, x) -> float:
    """Optimistic improvement over the incumbent, damped by cost times discrepancy."""
    return float(acquisition_batch(ctx, s, np.asarray(x, dtype=float).reshape(1, -1))[0])


def start_points(d: int, n_starts: int, seed, extra=()) -> np.ndarray:
    starts = lhs_sample(n_starts, d, seed)
    extra = [np.asarray(e, dtype=float).reshape(d) for e in extra]
    return np.vstack([starts, *extra]) if extra else starts


def maximize(fun, starts: np.ndarray, *, maxiter: int = MAXITER) -> tuple[np.ndarray, float]:
    """Multi-start bounded simplex ascent of a batch function on the unit cube.

    Among equal best values the lexicographically smallest location wins.
    """
    d = starts.shape[1]
    xs, fs = minimize_batch(
        lambda X: -fun(X), starts, np.zeros(d), np.ones(d),
        step=0.05, maxiter=maxiter, xatol=1e-6, fatol=1e-10,
    )
    values = -fs
    best = values.max()
    tied = np.flatnonzero(values == best)
    pick = tied[np.lexsort(xs[tied].T[::-1])[0]] if len(tied) > 1 else tied[0]
    return xs[pick], float(values[pick])


def select_next(ctx: AcquisitionContext) -> Candidate:
    """Best (source, location) pair; ties go to the lower source, then the smaller x."""
    starts = start_points(ctx.dim, ctx.n_starts, np.random.SeedSequence([ctx.seed, 0]),
                          extra=[ctx.agp.incumbent_location])
    best = None
    for s, state in enumerate(ctx.sources, start=1):
        if state.value_model is None or state.cost_model is None:
            continue
        x, value = maximize(lambda X, s=s: acquisition_batch(ctx, s, X), starts,
                            maxiter=ctx.maxiter)
        if best is None or value > best.value:
            best = Candidate(s, tuple(float(v) for v in x), value)
    if best is None:
        raise ValueError("no source has fitted models")
    return best


def needs_correction(cand: Candidate, sources: Sequence[SourceState], delta_min: float) -> bool:
    state = sources[cand.source_id - 1]
    if state.n == 0:
        return False
    dist = np.linalg.norm(state.locations - np.asarray(cand.location), axis=1)
    return bool(np.any(dist < delta_min))


def apply_correction(cand: Candidate, sources: Sequence[SourceState], agp: AugmentedModel,
                     delta_min: float, *, seed=0, n_starts: int = N_STARTS,
                     maxiter: int = MAXITER) -> Candidate:
    """Redirect a near-duplicate proposal to source 1 at its most uncertain location."""
    if not needs_correction(cand, sources, delta_min):
        return cand
    model = sources[0].value_model
    d = agp.X.shape[1]
    starts = start_points(d, n_starts, np.random.SeedSequence([seed, 1]),
                          extra=[agp.incumbent_location])
    x, sd = maximize(lambda X: np.sqrt(model.predict(X)[1]), starts, maxiter=maxiter)
    return Candidate(1, tuple(float(v) for v in x), sd, corrected=True)
