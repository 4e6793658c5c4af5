"""Closed-form asymptotics and validity checks for the model families.

For the correlated linear family the stationary mean, variance and
autocorrelation have exact expressions under the Stratonovich reading of
the multiplicative noise. They exist only on part of parameter space:

* mean exists when a - p**2/2 > 0
* variance exists when a - p**2 > 0

The stationary mean is

    G_inf = (V0 - c*p*q/2) / (a - p**2/2)

and the stationary variance without drive is

    D = (4*V0**2*p**2 - 8*a*V0*c*p*q
         + (4*a**2 - 4*a*(1-c**2)*p**2 + (1-c**2)*p**4) * q**2)
        / (2*(a - p**2) * (p**2 - 2*a)**2)

D vanishes exactly on the matched-noise line V0*p = a*c*q (see
resonance_q), which is where the noise sources conspire to cancel; the
signal-to-noise ratio of the driven response peaks there.

The phase-averaged stationary autocorrelation with drive V1*cos(omega*t)
splits into an undamped oscillatory term and a decaying term:

    C(tau) = V1**2*cos(omega*tau) / (2*((a - p**2/2)**2 + omega**2))
           + (V1**2*p**2 / (4*(a - p**2)*((a - p**2/2)**2 + omega**2)) + D)
             * exp(-(a - p**2/2)*|tau|)

Evaluation near the poles of these expressions is refused outright rather
than returned with degraded accuracy: any denominator difference whose
relative magnitude falls below GUARD_BAND raises GuardBandError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CorrelatedLinearModel,
    DoubleWellModel,
    ModelSpec,
    MonostablePowerModel,
    TimeDelayModel,
)

__all__ = [
    "GuardBandError",
    "DomainError",
    "ValidityReport",
    "validate",
    "timedelay_solution",
    "timedelay_parameters",
    "nonneg_drive_bound",
    "g_infinity",
    "asymptotic_variance",
    "correlation_components",
    "correlation_fn",
    "resonance_q",
]

GUARD_BAND = 1e-9


class DomainError(ValueError):
    """A closed form was requested outside its domain of validity."""


class GuardBandError(DomainError):
    """A denominator sits too close to zero for a trustworthy value."""


def _guarded_diff(x: float, y: float, what: str) -> float:
    d = x - y
    scale = max(abs(x), abs(y))
    if scale > 0.0 and abs(d) < GUARD_BAND * scale:
        raise GuardBandError(
            f"{what} = {d!r} is inside the refusal band ({GUARD_BAND} relative)"
        )
    return d


def _noise_params(model: ModelSpec) -> tuple[float, float, float, float, float]:
    if isinstance(model, CorrelatedLinearModel):
        return model.a, model.V0, model.p, model.q, model.c
    raise DomainError(
        f"closed forms apply to the correlated linear family, not {type(model).__name__}"
    )


@dataclass(frozen=True)
class ValidityReport:
    """Moment-existence and drive-bound flags for a model.

    variance_exists implies mean_exists: the variance condition
    a - p**2 > 0 is strictly stronger than a - p**2/2 > 0.
    """

    mean_exists: bool
    variance_exists: bool
    nonneg_drive_ok: bool
    messages: tuple[str, ...]

    @property
    def all_ok(self) -> bool:
        return self.mean_exists and self.variance_exists and self.nonneg_drive_ok


def nonneg_drive_bound(a: float, V0: float, omega: float) -> float:
    """Largest drive amplitude keeping the linear asymptotic response
    positive at all times: V0*sqrt(1 + (omega/a)**2)."""
    return V0 * math.sqrt(1.0 + (omega / a) ** 2)


def validate(model: ModelSpec) -> ValidityReport:
    """Evaluate the moment-existence and drive-positivity conditions.

    The comparisons are exact on the given floats; no guard band applies
    here because flags, unlike values, do not degrade near the boundary.
    """
    messages: list[str] = []
    if isinstance(model, TimeDelayModel):
        bound = nonneg_drive_bound(model.a, model.V0, model.drive.omega)
        ok = model.drive.V1 < bound
        if not ok:
            messages.append(
                f"drive amplitude {model.drive.V1} reaches the positivity bound {bound:.6g}; "
                "the asymptotic response touches or crosses zero"
            )
        return ValidityReport(True, True, ok, tuple(messages))

    if isinstance(model, DoubleWellModel):
        messages.append("double well: moments exist for every sigma; no drive bound applies")
        return ValidityReport(True, True, True, tuple(messages))

    if isinstance(model, (CorrelatedLinearModel, MonostablePowerModel)):
        a, p = model.a, model.p
        mean_ok = a - p * p / 2.0 > 0.0
        var_ok = a - p * p > 0.0
        if not mean_ok:
            messages.append(
                f"stationary mean undefined: a - p**2/2 = {a - p * p / 2.0:.6g} <= 0"
            )
        if not var_ok:
            messages.append(
                f"stationary variance undefined: a - p**2 = {a - p * p:.6g} <= 0"
            )
        if isinstance(model, CorrelatedLinearModel):
            bound = nonneg_drive_bound(model.a, model.V0, model.drive.omega)
            drive_ok = model.drive.V1 < bound
            if not drive_ok:
                messages.append(
                    f"drive amplitude {model.drive.V1} reaches the positivity bound {bound:.6g} "
                    "of the deterministic response"
                )
        else:
            drive_ok = True
            messages.append("power-law well: no closed-form drive positivity bound")
        return ValidityReport(mean_ok, var_ok, drive_ok, tuple(messages))

    raise TypeError(f"unknown model type {type(model).__name__}")


def timedelay_parameters(model: TimeDelayModel) -> tuple[float, float, float]:
    """(mean level, response amplitude, time delay) of the asymptotic
    solution of the noise-free linear model."""
    if not isinstance(model, TimeDelayModel):
        raise DomainError("timedelay_parameters applies to the time-delay family")
    a, omega = model.a, model.drive.omega
    level = model.V0 / a
    amplitude = model.drive.V1 / math.sqrt(a * a + omega * omega)
    delay = math.atan2(omega, a) / omega
    return level, amplitude, delay


def timedelay_solution(model: TimeDelayModel, t):
    """Asymptotic response G(t) = V0/a + amplitude*cos(omega*(t - delay) + phi).

    Valid after the exp(-a*t) transient of the initial condition has died;
    the caller picks how many drive periods to discard.
    """
    level, amplitude, delay = timedelay_parameters(model)
    omega, phi = model.drive.omega, model.drive.phi
    scalar = np.isscalar(t)
    value = level + amplitude * np.cos(omega * (np.asarray(t, dtype=float) - delay) + phi)
    return float(value) if scalar else value


def g_infinity(model: CorrelatedLinearModel) -> float:
    """Stationary mean (V0 - c*p*q/2)/(a - p**2/2)."""
    a, V0, p, q, c = _noise_params(model)
    lam = _guarded_diff(a, p * p / 2.0, "a - p**2/2")
    if lam <= 0.0:
        raise DomainError(f"stationary mean undefined: a - p**2/2 = {lam:.6g} <= 0")
    return (V0 - c * p * q / 2.0) / lam


def asymptotic_variance(model: CorrelatedLinearModel) -> float:
    """Stationary variance D of the undriven model (see module docstring)."""
    a, V0, p, q, c = _noise_params(model)
    gap = _guarded_diff(a, p * p, "a - p**2")
    if gap <= 0.0:
        raise DomainError(f"stationary variance undefined: a - p**2 = {gap:.6g} <= 0")
    spread = _guarded_diff(p * p, 2.0 * a, "p**2 - 2*a")
    one_mc2 = 1.0 - c * c
    numerator = math.fsum(
        [
            4.0 * V0 * V0 * p * p,
            -8.0 * a * V0 * c * p * q,
            (4.0 * a * a - 4.0 * a * one_mc2 * p * p + one_mc2 * p ** 4) * q * q,
        ]
    )
    return numerator / (2.0 * gap * spread * spread)


def correlation_components(model: CorrelatedLinearModel) -> tuple[float, float, float]:
    """(oscillatory amplitude, decaying amplitude, decay rate) of C(tau)."""
    a, V0, p, q, c = _noise_params(model)
    V1, omega = model.drive.V1, model.drive.omega
    lam = _guarded_diff(a, p * p / 2.0, "a - p**2/2")
    if lam <= 0.0:
        raise DomainError(f"stationary mean undefined: a - p**2/2 = {lam:.6g} <= 0")
    gap = _guarded_diff(a, p * p, "a - p**2")
    if gap <= 0.0:
        raise DomainError(f"stationary variance undefined: a - p**2 = {gap:.6g} <= 0")
    denom = lam * lam + omega * omega
    oscillatory = V1 * V1 / (2.0 * denom)
    decaying = V1 * V1 * p * p / (4.0 * gap * denom) + asymptotic_variance(model)
    return oscillatory, decaying, lam


def correlation_fn(model: CorrelatedLinearModel, tau):
    """Phase-averaged stationary autocorrelation C(tau) of the driven model."""
    oscillatory, decaying, lam = correlation_components(model)
    omega = model.drive.omega
    scalar = np.isscalar(tau)
    tau = np.abs(np.asarray(tau, dtype=float))
    value = oscillatory * np.cos(omega * tau) + decaying * np.exp(-lam * tau)
    return float(value) if scalar else value


def resonance_q(model: CorrelatedLinearModel) -> float:
    """Additive-noise strength q* = V0*p/(a*c) that makes D vanish.

    Requires c != 0; with uncorrelated sources no additive strength can
    cancel the multiplicative noise.
    """
    a, V0, p, q, c = _noise_params(model)
    if abs(c) < 1e-12:
        raise DomainError("matched-noise strength requires c != 0")
    return V0 * p / (a * c)
