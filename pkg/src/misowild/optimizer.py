"""Outer loop of multi-source optimization with location-dependent costs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .acquisition import (
    AcquisitionContext,
    Candidate,
    apply_correction,
    beta_schedule,
    default_delta_min,
    select_next,
    DELTA_CONF,
    MAXITER,
    N_STARTS,
)
from .agp import AugmentedModel, build_agp
from .errors import IllConditioned, RunAborted, SourceUnavailable
from .models import SourceState, ingest
from .problems import SyntheticProblem, evaluate
from .sampling import lhs_sample

ALGORITHMS = ("miso-wild", "ei", "ei-pu", "ei-cool")
COST_SCALINGS = ("none", "mean_init")
PHASES = ("init", "optimize", "final-eval")

_DESIGN_STREAM, _NOISE_STREAM, _ACQ_STREAM = 1, 2, 3


@dataclass
class RunConfig:
    n_init_per_source: int = 5
    max_evaluations: int = 50
    m: float = 1.0
    delta_min: float | None = None  # defaults to 1e-3 * sqrt(d)
    seed: int = 0
    budget: float | None = None
    algorithm: str = "miso-wild"
    beta_delta: float = DELTA_CONF
    cost_scaling: str = "none"
    cost_log_transform: bool = False
    n_starts: int = N_STARTS
    acq_maxiter: int = MAXITER

    def validate(self) -> "RunConfig":
        if self.n_init_per_source < 2:
            raise ValueError("n_init_per_source must be at least 2")
        if self.max_evaluations < 0:
            raise ValueError("max_evaluations must be non-negative")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.delta_min is not None and self.delta_min < 0:
            raise ValueError("delta_min must be non-negative")
        if self.budget is not None and not self.budget > 0:
            raise ValueError("budget must be positive")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.cost_scaling not in COST_SCALINGS:
            raise ValueError(f"unknown cost_scaling {self.cost_scaling!r}")
        if not 0 < self.beta_delta < 1:
            raise ValueError("beta_delta must lie in (0, 1)")
        return self


@dataclass(frozen=True)
class Record:
    iteration: int
    phase: str
    source_id: int
    location: tuple[float, ...]  # in the problem's own coordinates
    value: float
    cost: float
    cumulated_cost: float
    incumbent_value: float  # NaN where no incumbent applies
    corrected: bool = False


@dataclass
class RunHistory:
    records: list[Record] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def total_cost(self) -> float:
        return self.records[-1].cumulated_cost if self.records else 0.0

    def log(self, iteration, phase, source_id, location, value, cost, incumbent=math.nan,
            corrected=False) -> Record:
        rec = Record(
            iteration=int(iteration), phase=phase, source_id=int(source_id),
            location=tuple(float(v) for v in np.atleast_1d(location)),
            value=float(value), cost=float(cost),
            cumulated_cost=self.total_cost + float(cost),
            incumbent_value=float(incumbent), corrected=bool(corrected),
        )
        self.records.append(rec)
        return rec

    def phase_count(self, phase: str) -> int:
        return sum(r.phase == phase for r in self.records)


@dataclass
class RunResult:
    best_location: np.ndarray
    best_value: float
    total_cost: float
    history: RunHistory
    evaluations_per_source: tuple[int, ...]
    algorithm: str = "miso-wild"
    seed: int = 0
    proposals: list[Candidate] = field(default_factory=list)


class FinalSolution(NamedTuple):
    location: np.ndarray  # problem coordinates
    value: float
    extra_cost: float
    source_id: int  # where the incumbent was originally observed


def initial_design(n: int, d: int, seed: int, source_id: int) -> np.ndarray:
    """Per-source Latin hypercube; source 1's design is shared by every algorithm."""
    return lhs_sample(n, d, np.random.SeedSequence([seed, _DESIGN_STREAM, source_id]))


def noise_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _NOISE_STREAM]))


def iteration_seed(seed: int, t: int) -> int:
    return int(np.random.SeedSequence([seed, _ACQ_STREAM, t]).generate_state(1)[0])


def run_initial_design(problem, config, history, rng, sources=None) -> list[SourceState]:
    """Query the Latin hypercube design on each requested source and fit its models."""
    sources = range(1, problem.n_sources + 1) if sources is None else sources
    states = []
    for s in sources:
        design = initial_design(config.n_init_per_source, problem.dim, config.seed, s)
        batch = []
        for u in design:
            x = problem.space.denormalize(u)
            obs = evaluate(problem, s, x, rng)
            history.log(0, "init", s, x, obs.value, obs.cost)
            batch.append(obs)
        state = SourceState(s, log_cost=config.cost_log_transform, seed=config.seed)
        states.append(ingest(state, batch))
    return states


def final_solution(agp: AugmentedModel, sources, problem: SyntheticProblem,
                   rng: np.random.Generator) -> FinalSolution:
    """The incumbent of the final inducing set, verified on source 1 if it came from elsewhere."""
    x = problem.space.denormalize(agp.incumbent_location)
    if agp.incumbent_source == 1:
        return FinalSolution(x, agp.incumbent_value, 0.0, 1)
    obs = evaluate(problem, 1, x, rng)
    return FinalSolution(x, obs.value, obs.cost, agp.incumbent_source)


def _cost_scales(config: RunConfig, states) -> tuple[float, ...] | None:
    if config.cost_scaling == "none":
        return None
    return tuple(float(np.mean(st.costs)) for st in states)


def run_miso_wild(problem: SyntheticProblem, config: RunConfig) -> RunResult:
    """One seeded run: initial design on every source, then acquisition-driven queries.

    The loop stops after ``max_evaluations`` queries, or earlier when the
    pessimistic cost bound of the next query would push the cumulated cost
    past ``budget``. Any query or fitting failure is re-raised as
    :class:`RunAborted` carrying the partial history.
    """
    config.validate()
    d, space = problem.dim, problem.space
    delta_min = default_delta_min(d) if config.delta_min is None else config.delta_min
    rng = noise_rng(config.seed)
    history = RunHistory()
    proposals: list[Candidate] = []
    try:
        states = run_initial_design(problem, config, history, rng)
        scales = _cost_scales(config, states)
        agp = build_agp(states, config.m, seed=config.seed)
        # Augmenting points can leave the inducing set after a refit, so the
        # logged incumbent is the best one seen so far.
        incumbent = math.inf
        for t in range(1, config.max_evaluations + 1):
            ctx = AcquisitionContext(
                agp=agp, sources=states, beta=beta_schedule(t, d, config.beta_delta),
                delta_min=delta_min, iteration=t, seed=iteration_seed(config.seed, t),
                cost_scales=scales, n_starts=config.n_starts, maxiter=config.acq_maxiter,
            )
            cand = apply_correction(
                select_next(ctx), states, agp, delta_min, seed=ctx.seed,
                n_starts=config.n_starts, maxiter=config.acq_maxiter,
            )
            s = cand.source_id
            if config.budget is not None:
                bound = float(states[s - 1].cost_ucb(np.asarray(cand.location)))
                if history.total_cost + bound > config.budget:
                    break
            proposals.append(cand)
            x = space.denormalize(cand.location)
            obs = evaluate(problem, s, x, rng)
            states[s - 1] = ingest(states[s - 1], obs)
            agp = build_agp(states, config.m, seed=config.seed)
            incumbent = min(incumbent, agp.incumbent_value)
            history.log(t, "optimize", s, x, obs.value, obs.cost, incumbent, cand.corrected)

        final = final_solution(agp, states, problem, rng)
        best_x, best_y = final.location, final.value
        counts = [st.n for st in states]
        if final.source_id != 1:
            counts[0] += 1
            # Report the best verified source-1 point: the re-evaluated incumbent
            # can land above an earlier source-1 observation.
            f1 = states[0].values
            if f1.min() < best_y:
                i = int(np.argmin(f1))
                best_x, best_y = space.denormalize(states[0].locations[i]), float(f1[i])
            history.log(_next_iteration(history), "final-eval", 1, final.location, final.value,
                        final.extra_cost, best_y)
    except (SourceUnavailable, IllConditioned) as exc:
        raise RunAborted(f"run aborted: {exc}", history) from exc

    return RunResult(
        best_location=np.asarray(best_x, dtype=float), best_value=float(best_y),
        total_cost=history.total_cost, history=history,
        evaluations_per_source=tuple(counts), algorithm="miso-wild", seed=config.seed,
        proposals=proposals,
    )


def _next_iteration(history: RunHistory) -> int:
    return max((r.iteration for r in history), default=0) + 1


def run(problem: SyntheticProblem, config: RunConfig) -> RunResult:
    """Dispatch on ``config.algorithm``."""
    if config.algorithm == "miso-wild":
        return run_miso_wild(problem, config)
    from .baselines import run_baseline

    return run_baseline(problem, config)
