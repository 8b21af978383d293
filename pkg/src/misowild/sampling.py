from __future__ import annotations

import numpy as np
from scipy.stats import qmc


def lhs_sample(n: int, d: int, seed=None) -> np.ndarray:
    """Latin hypercube design of ``n`` points in ``[0, 1)^d``.

    Each column visits the strata ``[k/n, (k+1)/n)`` exactly once, with a
    uniform offset inside the stratum. ``seed`` may be an int, a
    ``SeedSequence`` or a ``Generator``.
    """
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    return qmc.LatinHypercube(d=d, scramble=True, rng=np.random.default_rng(seed)).random(n)
