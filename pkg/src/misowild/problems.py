"""Synthetic multi-source problems with location-dependent values and costs.

Source 1 is always the reference function being minimized. Every source
returns a coupled ``(value, cost)`` pair; noise on the value is additive
Gaussian with standard deviation ``value_noise[s]`` and noise on the cost is
Gaussian with standard deviation ``cost_noise[s] * c_s(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import SourceUnavailable
from .models import Observation
from .space import SearchSpace

COST_FLOOR = 0.01


@dataclass(eq=False)
class SyntheticProblem:
    name: str
    space: SearchSpace
    values: Sequence[Callable[[np.ndarray], float]]
    costs: Sequence[Callable[[np.ndarray], float]]
    value_noise: Sequence[float]
    cost_noise: Sequence[float]
    ground_truth: tuple[np.ndarray, float]
    # Failure injection: sources that always fail, and a global query budget
    # after which every query fails.
    unavailable: set[int] = field(default_factory=set)
    fail_after: int | None = None
    n_queries: int = 0

    @property
    def n_sources(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.space.dim

    def value(self, s: int, x) -> float:
        """Noiseless value of source ``s`` at raw location ``x``."""
        return float(self.values[s - 1](np.asarray(x, dtype=float)))

    def cost(self, s: int, x) -> float:
        return float(self.costs[s - 1](np.asarray(x, dtype=float)))


def evaluate(problem: SyntheticProblem, s: int, x, rng: np.random.Generator) -> Observation:
    """Query source ``s`` at raw location ``x``; the location is stored normalized."""
    if not 1 <= s <= problem.n_sources:
        raise ValueError(f"source {s} out of range 1..{problem.n_sources}")
    if s in problem.unavailable or (
        problem.fail_after is not None and problem.n_queries >= problem.fail_after
    ):
        raise SourceUnavailable(f"source {s} of {problem.name} is unavailable")
    x = np.asarray(x, dtype=float).reshape(problem.dim)
    value = problem.value(s, x)
    cost = problem.cost(s, x)
    if problem.value_noise[s - 1] > 0:
        value += problem.value_noise[s - 1] * rng.standard_normal()
    if problem.cost_noise[s - 1] > 0:
        cost += problem.cost_noise[s - 1] * cost * rng.standard_normal()
    problem.n_queries += 1
    return Observation(problem.space.normalize(x), value, max(cost, COST_FLOOR))


def forrester(x):
    x = np.asarray(x, dtype=float)[..., 0]
    return (6.0 * x - 2.0) ** 2 * np.sin(12.0 * x - 4.0)


def forrester_low(x):
    return 0.5 * forrester(x) + 10.0 * (np.asarray(x, dtype=float)[..., 0] - 0.5) - 5.0


FORRESTER_OPTIMUM = (np.array([0.7572487]), -6.020740)


def forrester_pair(value_noise=(0.01, 0.01), cost_noise=(0.01, 0.01)) -> SyntheticProblem:
    """Forrester function plus a cheap, biased low-fidelity version.

    Source 1 is expensive around its own minimizer; source 2 is cheap
    everywhere and only mildly location dependent.
    """
    return SyntheticProblem(
        name="forrester2",
        space=SearchSpace((0.0,), (1.0,)),
        values=[forrester, forrester_low],
        costs=[
            lambda x: 1.0 + 9.0 * np.exp(-((x[0] - 0.757) ** 2) / 0.02),
            lambda x: 0.1 + 0.4 * x[0],
        ],
        value_noise=tuple(value_noise),
        cost_noise=tuple(cost_noise),
        ground_truth=FORRESTER_OPTIMUM,
    )


def branin(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    b = 5.1 / (4.0 * np.pi**2)
    c = 5.0 / np.pi
    t = 1.0 / (8.0 * np.pi)
    return (x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * np.cos(x1) + 10.0


BRANIN_OPTIMUM = (np.array([np.pi, 2.275]), 0.39788735772973816)


def branin_trio(value_noise=(0.01, 0.01, 0.01), cost_noise=(0.01, 0.01, 0.01)) -> SyntheticProblem:
    """Branin with a sinusoidally biased source and a constant-offset source.

    The third source has a constant cost, the degenerate case for a cost GP.
    """
    return SyntheticProblem(
        name="branin3",
        space=SearchSpace((-5.0, 0.0), (10.0, 15.0)),
        values=[
            branin,
            lambda x: branin(x) + 2.0 * np.sin(x[..., 0]) * np.sin(x[..., 1]),
            lambda x: branin(x) + 10.0,
        ],
        costs=[
            lambda x: 5.0 + x[0] ** 2 / 10.0,
            lambda x: 1.0 + abs(x[1]) / 5.0,
            lambda x: 0.2,
        ],
        value_noise=tuple(value_noise),
        cost_noise=tuple(cost_noise),
        ground_truth=BRANIN_OPTIMUM,
    )


PROBLEMS = {
    "forrester2": forrester_pair,
    "branin3": branin_trio,
}


def get_problem(name: str, **kwargs) -> SyntheticProblem:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(**kwargs)
