"""Augmented GP: source-1 data plus the cheap-source observations that agree with it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gp import GPModel, mle_fit
from .models import SourceState

DEFAULT_M = 1.0


@dataclass(frozen=True, eq=False)
class AugmentedModel:
    """A single GP over the inducing set (source-1 pairs first, then the augmenting ones).

    ``provenance[i]`` is the source id of inducing point ``i``.
    """

    X: np.ndarray
    y: np.ndarray
    provenance: np.ndarray
    m: float
    model: GPModel
    incumbent_value: float
    incumbent_location: np.ndarray
    incumbent_source: int

    @property
    def n_augmenting(self) -> int:
        return int(np.sum(self.provenance != 1))

    def predict(self, x):
        return self.model.predict(x)


def build_augmenting_set(sources: Sequence[SourceState], m: float = DEFAULT_M):
    """Observations of sources 2..S whose source model agrees with source 1's.

    A pair ``(x, y_s)`` qualifies when ``|mu_s(x) - mu_1(x)| < m * sigma_1(x)``
    at its own stored location. The inequality is strict, so ``m = 0`` never
    admits anything and neither does a location where ``sigma_1`` vanishes.

    Returns a list of ``(location, value, source_id)`` ordered by source id,
    then ingestion order.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    reference = sources[0].value_model
    if reference is None:
        raise ValueError("source 1 has no fitted model")
    out = []
    for state in sources[1:]:
        if state.n == 0:
            continue
        X = state.locations
        mu1, var1 = reference.predict(X)
        eta = np.abs(state.value_model.predict_mean(X) - mu1)
        keep = eta < m * np.sqrt(var1)
        for obs, ok in zip(state.data, keep):
            if ok:
                out.append((np.array(obs.location), obs.value, state.source_id))
    return out


def fit_augmented(f1_pairs, augmenting, m: float = DEFAULT_M, *, seed=0) -> AugmentedModel:
    """Fit the GP on ``f1_pairs`` plus ``augmenting`` and locate the incumbent.

    The incumbent is the lowest value in the inducing set; on ties the first
    one in inducing order wins (source 1 before the rest).
    """
    if not f1_pairs:
        raise ValueError("source 1 must contribute at least one pair")
    X = [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in f1_pairs]
    y = [float(v) for _, v in f1_pairs]
    prov = [1] * len(f1_pairs)
    for x, v, s in augmenting:
        X.append(np.atleast_1d(np.asarray(x, dtype=float)))
        y.append(float(v))
        prov.append(int(s))
    X, y, prov = np.vstack(X), np.array(y), np.array(prov)
    model = mle_fit(X, y, seed=seed)
    best = int(np.argmin(y))
    return AugmentedModel(
        X=X, y=y, provenance=prov, m=float(m), model=model,
        incumbent_value=float(y[best]), incumbent_location=X[best].copy(),
        incumbent_source=int(prov[best]),
    )


def build_agp(sources: Sequence[SourceState], m: float = DEFAULT_M, *, seed=0) -> AugmentedModel:
    """Filter the cheap sources and fit the augmented GP in one go."""
    augmenting = build_augmenting_set(sources, m)
    reference = sources[0]
    if augmenting or reference.seed != seed:
        return fit_augmented(reference.value_pairs(), augmenting, m, seed=seed)
    # Same data, same fit procedure, same seed: the source-1 GP is the AGP.
    y = reference.values
    best = int(np.argmin(y))
    return AugmentedModel(
        X=reference.locations, y=y, provenance=np.ones(len(y), dtype=int), m=float(m),
        model=reference.value_model, incumbent_value=float(y[best]),
        incumbent_location=reference.locations[best], incumbent_source=1,
    )
