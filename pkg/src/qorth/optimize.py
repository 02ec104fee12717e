"""Adaptive Nelder-Mead simplex minimizer with restarts and a target value."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool


def nelder_mead(f, x0, steps, max_evals: int = 10_000, target: float = -np.inf,
                xtol: float = 1e-13, ftol: float = 1e-18) -> SimplexResult:
    """Minimize ``f`` from ``x0`` with an axis-aligned initial simplex.

    Dimension-adaptive coefficients (Gao and Han) keep the simplex from
    collapsing in a few dozen dimensions. Stops on reaching ``target``,
    on simplex collapse, or after ``max_evals`` evaluations.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    steps = np.broadcast_to(np.asarray(steps, dtype=float), (n,))
    alpha, gamma, rho, sigma = 1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2 * n), 1.0 - 1.0 / n

    sim = np.empty((n + 1, n))
    sim[0] = x0
    for k in range(n):
        sim[k + 1] = x0
        sim[k + 1, k] += steps[k]
    fs = np.array([f(x) for x in sim])
    nfev = n + 1
    nit = 0
    converged = False
    while nfev < max_evals:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if fs[0] <= target:
            converged = True
            break
        if (np.max(np.abs(sim[1:] - sim[0])) <= xtol
                and fs[-1] - fs[0] <= ftol):
            break
        nit += 1
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - sim[-1])
        fr = f(xr)
        nfev += 1
        if fr < fs[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            nfev += 1
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + rho * (xr - centroid)
        else:
            xc = centroid + rho * (sim[-1] - centroid)
        fc = f(xc)
        nfev += 1
        if fc < min(fr, fs[-1]):
            sim[-1], fs[-1] = xc, fc
            continue
        sim[1:] = sim[0] + sigma * (sim[1:] - sim[0])
        fs[1:] = [f(x) for x in sim[1:]]
        nfev += n
    best = int(np.argmin(fs))
    return SimplexResult(sim[best].copy(), float(fs[best]), nfev, nit,
                         converged or fs[best] <= target)


def restarted_nelder_mead(f, x0, steps, max_evals: int, target: float = -np.inf,
                          shrink: float = 0.5, rounds: int = 50) -> SimplexResult:
    """Repeat :func:`nelder_mead` from the incumbent with shrinking steps.

    Restarting rebuilds a well-shaped simplex, which is what lets the method
    get past the stalls it is prone to in higher dimensions.
    """
    steps = np.asarray(steps, dtype=float)
    x = np.asarray(x0, dtype=float)
    total = 0
    nit = 0
    best = None
    for _ in range(rounds):
        budget = max_evals - total
        if budget <= len(x) + 1:
            break
        res = nelder_mead(f, x, steps, max_evals=budget, target=target)
        total += res.nfev
        nit += res.nit
        if best is None or res.fun <= best.fun:
            best = res
        x = best.x
        if res.converged:
            break
        steps = np.maximum(steps * shrink, 1e-6)
    return SimplexResult(best.x, best.fun, total, nit, best.fun <= target)
