"""Nelder-Mead simplex search run on many starting points at once.

All starts advance in lock-step so the objective is evaluated on a stacked
batch of points per step; each start keeps its own simplex and stops moving
once it has converged. Points are projected onto the bounding box.
"""
from __future__ import annotations

import numpy as np

_REFLECT, _EXPAND, _CONTRACT, _SHRINK = 1.0, 2.0, 0.5, 0.5


def minimize_batch(fun, x0, lower, upper, *, step, maxiter, xatol=1e-4, fatol=1e-6):
    """Minimize ``fun`` from every row of ``x0``.

    Parameters
    ----------
    fun : callable
        Maps an ``(m, d)`` array of points to ``m`` objective values. Non-finite
        values are treated as ``+inf``.
    x0 : array, shape (k, d)
        Starting points, one per independent search.
    lower, upper : array-like, shape (d,)
        Box bounds.
    step : float or array-like
        Edge length of the initial simplex along each axis.
    maxiter : int
        Iteration cap per start.

    Returns
    -------
    x_best : array, shape (k, d)
    f_best : array, shape (k,)
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    k, d = x0.shape
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (d,))
    upper = np.broadcast_to(np.asarray(upper, dtype=float), (d,))
    step = np.broadcast_to(np.asarray(step, dtype=float), (d,))

    def evaluate(points):
        if points.shape[0] == 0:
            return np.empty(0)
        vals = np.asarray(fun(points), dtype=float).reshape(points.shape[0])
        return np.where(np.isfinite(vals), vals, np.inf)

    def clip(points):
        return np.clip(points, lower, upper)

    x0 = clip(x0)
    sim = np.repeat(x0[:, None, :], d + 1, axis=1)
    for j in range(d):
        moved = x0[:, j] + step[j]
        moved = np.where(moved > upper[j], x0[:, j] - step[j], moved)
        sim[:, j + 1, j] = moved
    sim = clip(sim)
    fs = evaluate(sim.reshape(-1, d)).reshape(k, d + 1)

    active = np.ones(k, dtype=bool)
    for _ in range(maxiter):
        order = np.argsort(fs, axis=1, kind="stable")
        fs = np.take_along_axis(fs, order, axis=1)
        sim = np.take_along_axis(sim, order[:, :, None], axis=1)

        with np.errstate(invalid="ignore"):
            xspread = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
            fspread = np.max(np.abs(fs[:, 1:] - fs[:, :1]), axis=1)
        active &= ~((xspread <= xatol) & (fspread <= fatol))
        if not active.any():
            break

        idx = np.flatnonzero(active)
        S, F = sim[idx], fs[idx]
        worst = S[:, -1]
        centroid = S[:, :-1].mean(axis=1)

        xr = clip(centroid + _REFLECT * (centroid - worst))
        fr = evaluate(xr)
        f_best, f_second, f_worst = F[:, 0], F[:, -2], F[:, -1]

        expand = fr < f_best
        accept = ~expand & (fr < f_second)
        outside = ~expand & ~accept & (fr < f_worst)
        inside = ~expand & ~accept & ~outside

        x2 = np.where(
            expand[:, None],
            centroid + _EXPAND * (centroid - worst),
            np.where(
                outside[:, None],
                centroid + _CONTRACT * (xr - centroid),
                centroid + _CONTRACT * (worst - centroid),
            ),
        )
        x2 = clip(x2)
        f2 = np.full(len(idx), np.inf)
        need = ~accept
        f2[need] = evaluate(x2[need])

        new_x, new_f = xr.copy(), fr.copy()
        take2 = (expand & (f2 < fr)) | (outside & (f2 <= fr)) | (inside & (f2 < f_worst))
        new_x[take2], new_f[take2] = x2[take2], f2[take2]
        shrink = (outside | inside) & ~take2

        keep = ~shrink
        S[keep, -1] = new_x[keep]
        F[keep, -1] = new_f[keep]
        if shrink.any():
            si = np.flatnonzero(shrink)
            pts = clip(S[si, :1] + _SHRINK * (S[si, 1:] - S[si, :1]))
            S[si, 1:] = pts
            F[si, 1:] = evaluate(pts.reshape(-1, d)).reshape(len(si), d)
        sim[idx], fs[idx] = S, F

    best = np.argmin(fs, axis=1)
    rows = np.arange(k)
    return sim[rows, best].copy(), fs[rows, best].copy()
