"""Complete-relaxation splitting: optimal allocations and the overhead frontier.

With full recovery between releases the exposures add, the problem is convex,
and the equal split is optimal (strictly so once the average release exceeds
the critical level).  Because single releases at or below the critical level
cost nothing, a finite number of releases eliminates exposure entirely; adding
a fixed per-release overhead turns the stage count into an integer trade-off
with an explicit safe/unsafe frontier ``k_safe(r)``.

Everything here works in threshold units where convenient: ``r = Q / delta_c``
is the load and ``k`` the overhead in one-shock exposure units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import LeakyStageError
from .model import EPS_THR, ModelParams, derive

#: Relative slack used when rounding a threshold ratio up to an integer, so
#: that ratios which are exact integers up to floating error do not get
#: bumped to the next stage count.
_CEIL_GUARD = 1e-12

#: Candidate costs within this relative distance of the minimum are ties.
_TIE_REL = 1e-12


def _guarded_ceil(x: float) -> int:
    """Ceiling that forgives floating error just above an integer."""
    return math.ceil(x - _CEIL_GUARD * max(1.0, abs(x)))


def excess_exposure(r: float, n: int) -> float:
    """Dimensionless minimal exposure of load ``r`` over ``n`` releases.

    Zero for ``r <= n``; otherwise ``r - n - n log(r/n)``, evaluated via
    log1p near the kink to limit cancellation.  This is the exposure term of
    the overhead objective, in units of one-shock exposure.
    """
    if r <= n:
        return 0.0
    x = r / n - 1.0
    if x < 1e-4:
        return n * (x - math.log1p(x))
    return r - n - n * (math.log(r) - math.log(n))


@dataclass(frozen=True)
class SplitProblem:
    """A fixed load ``Q`` to be split into exactly ``n`` separated releases."""

    Q: float
    n: int
    params: ModelParams

    def __post_init__(self) -> None:
        if not (math.isfinite(self.Q) and self.Q > 0.0):
            raise LeakyStageError(f"total load Q must be finite and > 0 (got {self.Q!r})")
        if not (isinstance(self.n, int) and self.n >= 1):
            raise LeakyStageError(f"release count n must be an integer >= 1 (got {self.n!r})")


@dataclass(frozen=True)
class AllocationResult:
    """An optimal split: release sizes, total exposure, and flags.

    ``is_safe`` holds exactly when the total exposure is zero;
    ``unique_minimizer`` is False when any split with all releases at or
    below the critical level would do equally well.
    """

    releases: tuple[float, ...]
    total_exposure: float
    is_safe: bool
    unique_minimizer: bool


@dataclass(frozen=True)
class OverheadResult:
    """Outcome of the overhead/exposure stage-count minimisation.

    ``ties`` lists every cost-optimal count (smallest first); ``n_star`` is
    the smallest.  At the frontier the safe count and one unsafe count are
    co-optimal, and both appear in ``ties``.
    """

    n_star: int
    cost: float
    residual_exposure: float
    is_fully_safe: bool
    ties: tuple[int, ...]


def min_exposure(Q: float, n: int, params: ModelParams, *, eps_thr: float = EPS_THR) -> float:
    """Smallest total exposure of load ``Q`` over ``n`` fully separated releases.

    Zero for ``Q <= n * delta_c``; otherwise the logarithmic closed form.
    Nonincreasing in ``n`` and strictly decreasing exactly while ``Q``
    exceeds ``n * delta_c``.
    """
    if not (math.isfinite(Q) and Q > 0.0):
        raise LeakyStageError(f"total load Q must be finite and > 0 (got {Q!r})")
    if not (isinstance(n, int) and n >= 1):
        raise LeakyStageError(f"release count n must be an integer >= 1 (got {n!r})")
    d = derive(params)
    cap = n * d.delta_c
    if Q <= cap + eps_thr:
        return 0.0
    x = Q / cap - 1.0
    if x < 1e-4:
        return (d.alpha / params.rho) * cap * (x - math.log1p(x))
    return (d.alpha / params.rho) * (Q - cap - cap * (math.log(Q) - math.log(cap)))


def optimal_split(problem: SplitProblem, *, eps_thr: float = EPS_THR) -> AllocationResult:
    """Exposure-minimising split of ``problem.Q`` into ``problem.n`` releases.

    Above total capacity ``n * delta_c`` the unique minimiser is the equal
    split.  Below it every split with all releases at or below the critical
    level has zero exposure; a canonical representative is returned (stages
    filled left to right at the critical level, then the remainder, then
    zeros) and ``unique_minimizer`` is False.  At exact capacity the unique
    zero-exposure split has every release at the critical level.
    """
    Q, n, params = problem.Q, problem.n, problem.params
    d = derive(params)
    cap = n * d.delta_c
    if Q >= cap - eps_thr:
        # equal split; unique whenever the average is at or above threshold
        releases = (Q / n,) * n
        return AllocationResult(
            releases=releases,
            total_exposure=min_exposure(Q, n, params, eps_thr=eps_thr),
            is_safe=Q <= cap + eps_thr,
            unique_minimizer=True,
        )
    full = int(Q // d.delta_c)  # < n here, since Q < n * delta_c
    remainder = max(0.0, Q - full * d.delta_c)
    releases = [d.delta_c] * full + [remainder] + [0.0] * (n - full - 1)
    return AllocationResult(
        releases=tuple(releases),
        total_exposure=0.0,
        is_safe=True,
        unique_minimizer=False,
    )


def minimal_safe_count(Q: float, params: ModelParams) -> int:
    """Smallest release count whose combined capacity covers ``Q``.

    This is the ceiling of ``Q / delta_c`` with a small relative guard so
    that loads which are exact multiples of the critical level (up to
    floating error) are not pushed to an extra stage.
    """
    if not (math.isfinite(Q) and Q > 0.0):
        raise LeakyStageError(f"total load Q must be finite and > 0 (got {Q!r})")
    d = derive(params)
    return max(1, _guarded_ceil(Q / d.delta_c))


def overhead_optimal_count(r: float, k: float) -> OverheadResult:
    """Cost-optimal release count for load ``r`` with per-release overhead ``k``.

    Minimises ``n * k + excess(r, n)`` over ``n in {1, ..., ceil(r)}`` (the
    exposure term vanishes for ``n >= r``, so larger counts are dominated).
    All counts whose cost ties the minimum within a relative 1e-12 are
    reported; ``n_star`` is the smallest of them.
    """
    if not (math.isfinite(r) and r > 0.0):
        raise LeakyStageError(f"dimensionless load r must be finite and > 0 (got {r!r})")
    if not (math.isfinite(k) and k >= 0.0):
        raise LeakyStageError(f"dimensionless overhead k must be finite and >= 0 (got {k!r})")
    n_safe = max(1, _guarded_ceil(r))
    costs = [n * k + excess_exposure(r, n) for n in range(1, n_safe + 1)]
    best = min(costs)
    ties = tuple(
        n for n, cost in enumerate(costs, start=1) if cost <= best + _TIE_REL * max(1.0, best)
    )
    n_star = ties[0]
    residual = excess_exposure(r, n_star)
    return OverheadResult(
        n_star=n_star,
        cost=costs[n_star - 1],
        residual_exposure=residual,
        is_fully_safe=residual == 0.0,
        ties=ties,
    )


def k_safe(r: float) -> float:
    """Largest overhead at which the fully safe count stays cost-optimal.

    ``+inf`` when one release is already safe (``ceil(r) = 1``); otherwise
    the minimum over unsafe counts ``m < ceil(r)`` of the exposure removed
    per extra stage.  Full safety is optimal exactly when ``k <= k_safe(r)``.
    """
    if not (math.isfinite(r) and r > 0.0):
        raise LeakyStageError(f"dimensionless load r must be finite and > 0 (got {r!r})")
    n_safe = max(1, _guarded_ceil(r))
    if n_safe <= 1:
        return math.inf
    return min(excess_exposure(r, m) / (n_safe - m) for m in range(1, n_safe))


def continuous_relaxed_count(r: float, k: float) -> float:
    """Stationary point ``r * exp(-k)`` of the relaxed (non-integer) objective.

    A diagnostic for how overhead pulls the optimum away from the safe count;
    not an integer solution formula.
    """
    if not (math.isfinite(r) and r > 0.0):
        raise LeakyStageError(f"dimensionless load r must be finite and > 0 (got {r!r})")
    if not (math.isfinite(k) and k >= 0.0):
        raise LeakyStageError(f"dimensionless overhead k must be finite and >= 0 (got {k!r})")
    return r * math.exp(-k)
