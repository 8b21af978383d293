from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box of ``dim`` dimensions.

    Every model in the package works on the unit hypercube; ``normalize`` and
    ``denormalize`` map between the box and ``[0, 1]^dim``.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper must be non-empty and of equal length")
        if any(u <= lo for lo, u in zip(lower, upper)):
            raise ValueError("every upper bound must exceed its lower bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def width(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def normalize(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - np.asarray(self.lower)) / self.width

    def denormalize(self, u) -> np.ndarray:
        return np.asarray(self.lower) + np.asarray(u, dtype=float) * self.width

    @classmethod
    def unit(cls, dim: int) -> "SearchSpace":
        return cls((0.0,) * dim, (1.0,) * dim)
