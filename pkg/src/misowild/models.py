"""Per-source datasets and their twin GPs: one for values, one for query costs."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import NonpositiveCost
from .gp import GPModel, mle_fit


@dataclass(frozen=True)
class Observation:
    """A coupled query result: the value cannot be had without paying the cost."""

    location: tuple[float, ...]  # on the unit hypercube
    value: float
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in np.atleast_1d(self.location)))
        if not self.cost > 0:
            raise NonpositiveCost(f"query cost must be positive, got {self.cost!r}")


@dataclass(frozen=True, eq=False)
class SourceState:
    """Everything known about one information source.

    ``value_model`` is fit on the (location, value) projection of ``data`` and
    ``cost_model`` on the (location, cost) projection. Both are ``None`` until
    the first observation arrives. With ``log_cost`` the cost GP is fit on
    log-costs.
    """

    source_id: int
    data: tuple[Observation, ...] = ()
    value_model: GPModel | None = None
    cost_model: GPModel | None = None
    log_cost: bool = False
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.data)

    @property
    def locations(self) -> np.ndarray:
        return np.array([o.location for o in self.data], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([o.value for o in self.data], dtype=float)

    @property
    def costs(self) -> np.ndarray:
        return np.array([o.cost for o in self.data], dtype=float)

    def value_pairs(self) -> list[tuple[tuple[float, ...], float]]:
        return [(o.location, o.value) for o in self.data]

    def cost_pairs(self) -> list[tuple[tuple[float, ...], float]]:
        return [(o.location, o.cost) for o in self.data]

    def cost_ucb(self, x):
        """Pessimistic cost estimate ``max(0, p(x) + q(x))``; batch-aware."""
        mean, var = self.cost_model.predict(x)
        ucb = mean + np.sqrt(var)
        if self.log_cost:
            return np.exp(ucb)
        return np.maximum(ucb, 0.0)


def ingest(state: SourceState, obs: Observation | Iterable[Observation]) -> SourceState:
    """Append one or more observations and refit both GPs by MLE."""
    new = (obs,) if isinstance(obs, Observation) else tuple(obs)
    for o in new:
        if not isinstance(o, Observation):
            raise TypeError(f"expected Observation, got {type(o).__name__}")
    data = state.data + new
    X = np.array([o.location for o in data], dtype=float)
    values = np.array([o.value for o in data], dtype=float)
    costs = np.array([o.cost for o in data], dtype=float)
    cost_targets = np.log(costs) if state.log_cost else costs
    return replace(
        state,
        data=data,
        value_model=mle_fit(X, values, seed=state.seed),
        cost_model=mle_fit(X, cost_targets, seed=state.seed),
    )


def discrepancy(model_a: GPModel, model_b: GPModel, x):
    """Absolute difference of the two posterior means at ``x``."""
    return np.abs(model_a.predict_mean(x) - model_b.predict_mean(x))


def cost_ucb(state: SourceState, x):
    return state.cost_ucb(x)
