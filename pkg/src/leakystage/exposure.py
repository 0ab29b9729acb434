"""Single-release threshold exposure: closed form, derivatives, and oracles.

A release of size ``q`` into an empty reservoir decays as ``q * exp(-rho t)``.
The exposure is the time-integral of the positive part of the growth pressure
along that path.  It is identically zero on ``[0, delta_c]`` (the zero
buffer), convex, continuously differentiable at the threshold, and has
quadratic onset just above it.

``exposure_closed_form`` is the production path; ``exposure_quadrature`` and
``exposure_spectral_form`` are independent numerical routes used to check it.
All functions are pure and thread-safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import LeakyStageError
from .model import EPS_THR, ModelParams, derive, growth_pressure, normalized_factor

#: Below this relative overshoot the log is evaluated via log1p to avoid
#: cancellation; the onset regime is quadratic and numerically delicate.
_LOG1P_SWITCH = 1e-4


@dataclass(frozen=True)
class ExposureValue:
    """Exposure of one release: integral value and duration above threshold.

    ``value`` is in time units and is exactly 0.0 if and only if the release
    never exceeds the critical level (``active_duration == 0``).
    """

    value: float
    active_duration: float

    def __post_init__(self) -> None:
        if self.value < 0.0 or self.active_duration < 0.0:
            raise LeakyStageError("exposure and active duration must be nonnegative")
        if (self.value == 0.0) != (self.active_duration == 0.0):
            raise LeakyStageError("exposure is zero exactly when the active duration is zero")


def _log_ratio(q: float, delta_c: float) -> float:
    """log(q / delta_c) with cancellation control near the threshold."""
    x = q / delta_c - 1.0
    if x < _LOG1P_SWITCH:
        return math.log1p(x)
    return math.log(q) - math.log(delta_c)


def exposure_closed_form(
    q: float, params: ModelParams, *, eps_thr: float = EPS_THR
) -> ExposureValue:
    """Closed-form threshold exposure of a single release of size ``q``.

    Returns exactly 0.0 for ``q <= delta_c`` (within ``eps_thr``); above the
    threshold the value is ``(delta-beta)/rho * (q - delta_c - delta_c *
    log(q/delta_c))`` and the active duration is ``log(q/delta_c)/rho``.
    """
    if q < 0.0:
        raise LeakyStageError(f"release size must be >= 0 (got {q!r})")
    d = derive(params)
    if q <= d.delta_c + eps_thr:
        return ExposureValue(value=0.0, active_duration=0.0)
    ln = _log_ratio(q, d.delta_c)
    value = (d.alpha / params.rho) * (q - d.delta_c - d.delta_c * ln)
    return ExposureValue(value=value, active_duration=ln / params.rho)


def exposure_batch(
    q, params: ModelParams, *, eps_thr: float = EPS_THR
) -> np.ndarray:
    """Vectorised exposure values for an array of release sizes.

    Same piecewise formula as :func:`exposure_closed_form`; plateau entries
    are exact zeros.  Intended for grid searches over many candidate splits.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0.0):
        raise LeakyStageError("release sizes must be >= 0")
    d = derive(params)
    out = np.zeros_like(q)
    active = q > d.delta_c + eps_thr
    qa = q[active]
    ln = np.log(qa) - math.log(d.delta_c)
    out[active] = (d.alpha / params.rho) * (qa - d.delta_c - d.delta_c * ln)
    return out


def exposure_quadrature(
    q: float, params: ModelParams, tol: float = 1e-10, *, eps_thr: float = EPS_THR
) -> float:
    """Exposure by adaptive quadrature of the growth pressure along the path.

    Integrates ``g(q e^{-rho t})`` over the analytically known active window
    ``[0, t_q]`` only, where the integrand is smooth and positive, so the
    positive-part kink never enters the quadrature.  Independent of the
    closed form; agrees with it to the requested relative tolerance.
    """
    if tol <= 0.0:
        raise LeakyStageError(f"tolerance must be > 0 (got {tol!r})")
    if q < 0.0:
        raise LeakyStageError(f"release size must be >= 0 (got {q!r})")
    d = derive(params)
    if q <= d.delta_c + eps_thr:
        return 0.0  # empty active window
    t_q = _log_ratio(q, d.delta_c) / params.rho
    value, _ = quad(
        lambda t: growth_pressure(q * math.exp(-params.rho * t), params),
        0.0,
        t_q,
        epsabs=0.0,
        epsrel=tol,
        limit=200,
    )
    return value


def exposure_derivative(
    q: float, params: ModelParams, *, eps_thr: float = EPS_THR
) -> float:
    """Marginal exposure per unit release size.

    Exactly 0.0 on the plateau, ``(delta-beta)/rho * (1 - delta_c/q)`` above
    it; continuous at the threshold with value 0 and increasing towards
    ``(delta-beta)/rho`` for large releases.
    """
    if q < 0.0:
        raise LeakyStageError(f"release size must be >= 0 (got {q!r})")
    d = derive(params)
    if q <= d.delta_c + eps_thr:
        return 0.0
    return (d.alpha / params.rho) * (1.0 - d.delta_c / q)


def exposure_near_threshold(epsilon: float, params: ModelParams) -> float:
    """Leading quadratic term of the exposure just above the threshold.

    For a release ``delta_c * (1 + epsilon)`` the exposure is
    ``(delta-beta) * delta_c / (2 rho) * epsilon**2`` up to an O(epsilon^3)
    error.  This is an approximation, not the exact value.
    """
    d = derive(params)
    return (d.alpha * d.delta_c) / (2.0 * params.rho) * epsilon * epsilon


def exposure_spectral_form(
    q: float, params: ModelParams, tol: float = 1e-10, *, eps_thr: float = EPS_THR
) -> float:
    """Exposure via the normalised growth factor: ``mu * int [R - 1]_+ dt``.

    Evaluates the excess of ``R(q e^{-rho t})`` above 1 on the active window
    numerically.  Because ``g = mu (R - 1)`` this must agree with the closed
    form; the route through ``R`` is kept separate on purpose.
    """
    if tol <= 0.0:
        raise LeakyStageError(f"tolerance must be > 0 (got {tol!r})")
    if q < 0.0:
        raise LeakyStageError(f"release size must be >= 0 (got {q!r})")
    d = derive(params)
    if q <= d.delta_c + eps_thr:
        return 0.0  # R <= 1 along the whole path
    t_q = _log_ratio(q, d.delta_c) / params.rho
    value, _ = quad(
        lambda t: normalized_factor(q * math.exp(-params.rho * t), params) - 1.0,
        0.0,
        t_q,
        epsabs=0.0,
        epsrel=tol,
        limit=200,
    )
    return params.mu * value
