"""Shared helpers for the test suite: random instances and brute-force oracles.

The oracles here are deliberately independent of the closed forms they check:
grid/simplex searches for the allocation optimum, a one-dimensional Bellman
grid recursion for the minimax peak value, and plain enumeration for the
overhead trade-off.
"""
from __future__ import annotations

import math

import numpy as np

from leakystage import ImpulseSchedule, ModelParams
from leakystage.exposure import exposure_batch


def random_params(rng: np.random.Generator) -> ModelParams:
    """A random rate set in the shock-sensitive regime."""
    beta = rng.uniform(0.05, 1.5)
    mu = beta + rng.uniform(0.02, 1.5)
    delta = mu + rng.uniform(0.02, 2.0)
    return ModelParams(beta=beta, mu=mu, delta=delta, rho=rng.uniform(0.1, 3.0))


def random_schedule(
    rng: np.random.Generator, t_max: float = 6.0, max_events: int = 5, max_size: float = 1.0
) -> ImpulseSchedule:
    count = int(rng.integers(1, max_events + 1))
    times = np.unique(np.round(np.sort(rng.uniform(0.0, t_max, count)), 6))
    sizes = rng.uniform(0.0, max_size, len(times))
    return ImpulseSchedule(tuple((float(t), float(q)) for t, q in zip(times, sizes)))


# ---------------------------------------------------------------------------
# allocation oracles


def grid_min_split_2(params: ModelParams, Q: float, n_points: int):
    """Brute-force the two-way split on a uniform grid.

    Returns (min total exposure, argmin first release, grid spacing).
    """
    q1 = np.linspace(0.0, Q, n_points)
    total = exposure_batch(q1, params) + exposure_batch(np.clip(Q - q1, 0.0, None), params)
    i = int(np.argmin(total))
    return float(total[i]), float(q1[i]), Q / (n_points - 1)


def grid_min_split_3(params: ModelParams, Q: float, m: int):
    """Brute-force the three-way split on a triangular simplex grid.

    ``m`` is the subdivisions per edge; the candidate count is about m^2/2.
    Returns (min total exposure, argmin releases, edge spacing).
    """
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = (i + j) <= m
    q1 = Q * i[keep] / m
    q2 = Q * j[keep] / m
    q3 = np.clip(Q - q1 - q2, 0.0, None)
    total = (
        exposure_batch(q1, params)
        + exposure_batch(q2, params)
        + exposure_batch(q3, params)
    )
    best = int(np.argmin(total))
    args = (float(q1[best]), float(q2[best]), float(q3[best]))
    return float(total[best]), args, Q / m


def enumerate_overhead(r: float, k: float, extra: int = 3):
    """Exhaustive overhead minimisation over {1, ..., ceil(r) + extra}.

    Returns (best cost, argmin, all ties within 1e-12 relative).  The extra
    candidates confirm that counts beyond the safe one never win.
    """

    def cost(n: int) -> float:
        excess = 0.0 if r <= n else r - n - n * math.log(r / n)
        return n * k + excess

    top = math.ceil(r) + extra
    costs = {n: cost(n) for n in range(1, top + 1)}
    best = min(costs.values())
    ties = [n for n, c in costs.items() if c <= best + 1e-12 * max(1.0, best)]
    return best, ties[0], ties


# ---------------------------------------------------------------------------
# minimax peak oracles


def recurrence_peaks(lam: float, releases: np.ndarray, a0: float = 0.0) -> np.ndarray:
    """Peaks of the post-release recurrence for a (trials, n) release matrix."""
    level = np.full(releases.shape[0], a0, dtype=float) + releases[:, 0]
    peak = level.copy()
    for k in range(1, releases.shape[1]):
        level = lam * level + releases[:, k]
        np.maximum(peak, level, out=peak)
    return peak


def bellman_tables(lam: float, m_max: int, nx: int = 4001, n_sigma: int = 1025):
    """Value tables of the scaled minimax recursion on an x-grid.

    The peak value scales linearly when (a, Q) are scaled together, so with
    tau = a + Q and x = a / tau the recursion collapses to one dimension:

        w_1(x) = 1
        w_m(x) = min_{sigma in [x, 1]} max(sigma, tau'(sigma) w_{m-1}(x'(sigma)))

    with tau'(sigma) = 1 - (1 - lam) sigma and x' = lam sigma / tau'(sigma)
    (sigma is the next post-release level over tau).  The inner objective is
    convex in sigma (the continuation is a perspective composition of the
    previous convex value), so a coarse scan plus bracketed refinement finds
    the global minimum.
    """
    xs = np.linspace(0.0, 1.0, nx)
    tables = {1: np.ones(nx)}
    for m in range(2, m_max + 1):
        tables[m] = _bellman_level(xs, tables[m - 1], lam, n_sigma)
    return xs, tables


def _bellman_level(
    xs: np.ndarray, w_prev: np.ndarray, lam: float, n_sigma: int, refine: int = 3
) -> np.ndarray:
    rows = np.arange(len(xs))
    u = np.linspace(0.0, 1.0, n_sigma)
    sigma = xs[:, None] + u[None, :] * (1.0 - xs)[:, None]
    taup = 1.0 - (1.0 - lam) * sigma
    objective = np.maximum(sigma, taup * np.interp(lam * sigma / taup, xs, w_prev))
    idx = np.argmin(objective, axis=1)
    best = objective[rows, idx]
    lo = sigma[rows, np.clip(idx - 1, 0, n_sigma - 1)]
    hi = sigma[rows, np.clip(idx + 1, 0, n_sigma - 1)]
    for _ in range(refine):
        sub = np.linspace(0.0, 1.0, 65)
        s = lo[:, None] + sub[None, :] * (hi - lo)[:, None]
        taup = 1.0 - (1.0 - lam) * s
        objective = np.maximum(s, taup * np.interp(lam * s / taup, xs, w_prev))
        j = np.argmin(objective, axis=1)
        best = np.minimum(best, objective[rows, j])
        lo = s[rows, np.clip(j - 1, 0, 64)]
        hi = s[rows, np.clip(j + 1, 0, 64)]
    return best


def bellman_state_value(xs: np.ndarray, table: np.ndarray, a: float, Q: float) -> float:
    tau = a + Q
    if tau == 0.0:
        return 0.0
    return tau * float(np.interp(a / tau, xs, table))


def bellman_descent_3(
    a: float, Q: float, lam: float, n_grid: int = 10_001, chunk: int = 200
) -> float:
    """Three-stage minimax value by direct grid recursion over the releases.

    Minimises over (q1, q2) on n_grid-point grids with the exact one-stage
    value at the bottom; memory is kept flat by chunking the outer grid.
    """
    u = np.linspace(0.0, 1.0, n_grid)
    q1 = Q * u
    A1 = a + q1
    R1 = Q - q1
    best = math.inf
    for start in range(0, n_grid, chunk):
        A1c = A1[start : start + chunk, None]
        R1c = R1[start : start + chunk, None]
        q2 = R1c * u[None, :]
        A2 = lam * A1c + q2
        H1 = lam * A2 + (R1c - q2)  # one release left: absorb the remainder
        H2 = np.min(np.maximum(A2, H1), axis=1)
        best = min(best, float(np.max([A1[start : start + chunk], H2], axis=0).min()))
    return best
