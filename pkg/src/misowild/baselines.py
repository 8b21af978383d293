"""Single-source cost-aware baselines on source 1: EI, EI per unit cost, cost-cooled EI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .acquisition import maximize, start_points
from .errors import IllConditioned, RunAborted, SourceUnavailable
from .models import ingest
from .optimizer import (
    RunConfig,
    RunHistory,
    RunResult,
    iteration_seed,
    noise_rng,
    run_initial_design,
)
from .problems import SyntheticProblem, evaluate

COST_FLOOR = 1e-6
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def expected_improvement(mean, std, best):
    """Expected improvement below ``best`` of a Gaussian with ``mean`` and ``std``."""
    mean, std = np.asarray(mean, dtype=float), np.asarray(std, dtype=float)
    gain = best - mean
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u = gain / std
        ei = gain * ndtr(u) + std * _INV_SQRT_2PI * np.exp(-0.5 * u * u)
    ei = np.where(std > 0, ei, np.maximum(gain, 0.0))
    ei = np.maximum(ei, 0.0)
    return float(ei) if ei.ndim == 0 else ei


@dataclass(frozen=True)
class CoolingState:
    tau: float  # total budget
    tau_init: float  # cost of the initial design
    tau_n: float  # cost cumulated so far

    def __post_init__(self):
        if not self.tau > self.tau_init >= 0:
            raise ValueError("need tau > tau_init >= 0")


def cooling_alpha(state: CoolingState) -> float:
    """Fraction of the post-design budget still unspent, clamped to [0, 1]."""
    alpha = (state.tau - state.tau_n) / (state.tau - state.tau_init)
    return float(min(max(alpha, 0.0), 1.0))


def ei_per_cost(ei, cost_mean, alpha: float = 1.0):
    return ei / np.maximum(cost_mean, COST_FLOOR) ** alpha


def ei_cool_value(x, model, cost_model, state: CoolingState, best=None):
    """EI divided by the expected cost raised to the cooling exponent.

    ``best`` defaults to the lowest training target of ``model``.
    """
    mean, var = model.predict(x)
    if best is None:
        best = float(np.min(model.y * model.y_std + model.y_mean))
    ei = expected_improvement(mean, np.sqrt(var), best)
    return ei_per_cost(ei, cost_model.predict_mean(x), cooling_alpha(state))


def default_tau(tau_init: float, n_init: int, max_evaluations: int) -> float:
    """Budget that pays for ``max_evaluations`` queries at the mean initial-design cost."""
    return tau_init * (1.0 + max_evaluations / n_init)


def run_baseline(problem: SyntheticProblem, config: RunConfig) -> RunResult:
    """Cost-aware BO restricted to source 1.

    ``config.budget`` both sets the cooling budget and stops the run when the
    next query's pessimistic cost would exceed it. Without a budget the
    cooling budget defaults to :func:`default_tau` and only
    ``max_evaluations`` stops the run.
    """
    config.validate()
    if config.algorithm not in ("ei", "ei-pu", "ei-cool"):
        raise ValueError(f"{config.algorithm!r} is not a baseline")
    space = problem.space
    rng = noise_rng(config.seed)
    history = RunHistory()
    try:
        (state,) = run_initial_design(problem, config, history, rng, sources=[1])
        tau_init = history.total_cost
        tau = config.budget if config.budget is not None else default_tau(
            tau_init, config.n_init_per_source, config.max_evaluations)
        for t in range(1, config.max_evaluations + 1):
            model, cost_model = state.value_model, state.cost_model
            y = state.values
            best = float(y.min())
            if config.algorithm == "ei-cool":
                alpha = cooling_alpha(CoolingState(tau, tau_init, history.total_cost)) \
                    if tau > tau_init else 0.0
            else:
                alpha = 1.0

            def acq(X):
                mean, var = model.predict(X)
                ei = expected_improvement(mean, np.sqrt(var), best)
                if config.algorithm == "ei":
                    return ei
                cost = cost_model.predict_mean(X)
                if state.log_cost:
                    cost = np.exp(cost)
                return ei_per_cost(ei, cost, alpha)

            seed = iteration_seed(config.seed, t)
            starts = start_points(problem.dim, config.n_starts, np.random.SeedSequence([seed, 0]),
                                  extra=[state.locations[int(np.argmin(y))]])
            u, _ = maximize(acq, starts, maxiter=config.acq_maxiter)
            if config.budget is not None:
                if history.total_cost + float(state.cost_ucb(u)) > config.budget:
                    break
            x = space.denormalize(u)
            obs = evaluate(problem, 1, x, rng)
            state = ingest(state, obs)
            history.log(t, "optimize", 1, x, obs.value, obs.cost, min(best, obs.value))
    except (SourceUnavailable, IllConditioned) as exc:
        raise RunAborted(f"run aborted: {exc}", history) from exc

    i = int(np.argmin(state.values))
    counts = [0] * problem.n_sources
    counts[0] = state.n
    return RunResult(
        best_location=space.denormalize(state.locations[i]), best_value=float(state.values[i]),
        total_cost=history.total_cost, history=history, evaluations_per_source=tuple(counts),
        algorithm=config.algorithm, seed=config.seed,
    )
