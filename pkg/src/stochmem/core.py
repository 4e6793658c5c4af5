"""Model definitions for stochastic memristive dynamics.

The state variable is a scalar memductance G (dimensionless units). Four
model families are supported, all driven by a cosine voltage V1*cos(omega*t
+ phi) and all expressible as drift plus diffusion:

* time_delay: linear relaxation, no noise. Has a closed-form asymptotic
  response (see the oracle module).
* double_well: overdamped motion in a fixed tilted quartic potential with
  additive noise of strength sigma. The potential shape is part of the model
  definition and is not a runtime parameter.
* correlated_linear: linear relaxation with multiplicative noise of strength
  p on G and additive noise of strength q, the two sources correlated with
  coefficient c in [-1, 1].
* monostable_power: same noise structure around a single-well power-law
  potential G**(2n)/(2n) with integer n in [2, 6].

The additive noise source is decomposed as xi_a = c*xi + sqrt(1-c**2)*eta
with xi, eta independent, so every family exposes exactly two independent
diffusion coefficients (g_xi, g_eta). Negative memductance is allowed and
never clamped; it is a diagnostic of parameter regimes, not an error.

All functions broadcast over G, so an ensemble of states can be advanced as
one array. Scalar inputs return Python floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Union

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "DriveSignal",
    "TimeDelayModel",
    "DoubleWellModel",
    "CorrelatedLinearModel",
    "ShiftedCorrelatedLinearModel",
    "MonostablePowerModel",
    "ModelSpec",
    "drive_voltage",
    "drift",
    "autonomous_drift",
    "diffusion",
    "stratonovich_correction",
    "current",
    "potential_value",
    "potential_slope",
    "stationary_points",
    "well_depths",
    "w_polynomial",
    "default_initial_state",
    "resonance_holds",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DriveSignal:
    """Cosine voltage drive V1*cos(omega*t + phi)."""

    V1: float
    omega: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not self.V1 >= 0.0:
            raise ValueError(f"drive amplitude must be >= 0, got {self.V1}")
        if not self.omega > 0.0:
            raise ValueError(f"drive frequency must be > 0, got {self.omega}")
        if not 0.0 <= self.phi < TWO_PI:
            raise ValueError(f"drive phase must lie in [0, 2*pi), got {self.phi}")

    @property
    def period(self) -> float:
        return TWO_PI / self.omega


@dataclass(frozen=True)
class TimeDelayModel:
    """Noise-free linear relaxation dG/dt = -a*G + V0 + drive."""

    family: ClassVar[str] = "time_delay"

    a: float
    V0: float
    drive: DriveSignal

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"relaxation rate a must be > 0, got {self.a}")


@dataclass(frozen=True)
class DoubleWellModel:
    """Fixed tilted quartic double well with additive noise sigma.

    The potential is 0.25*(G-2)**4 - 0.5*(G-2)**2 - 0.125*(G-2); its two
    minima sit near G=1.07 and G=3.06 with the right well the deeper one.
    """

    family: ClassVar[str] = "double_well"

    sigma: float
    drive: DriveSignal

    def __post_init__(self) -> None:
        if not self.sigma >= 0.0:
            raise ValueError(f"noise strength sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class CorrelatedLinearModel:
    """Linear model with correlated multiplicative and additive noise."""

    family: ClassVar[str] = "correlated_linear"

    a: float
    V0: float
    p: float
    q: float
    c: float
    drive: DriveSignal

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"relaxation rate a must be > 0, got {self.a}")
        if not self.p >= 0.0:
            raise ValueError(f"multiplicative noise strength p must be >= 0, got {self.p}")
        if not self.q >= 0.0:
            raise ValueError(f"additive noise strength q must be >= 0, got {self.q}")
        if not -1.0 <= self.c <= 1.0:
            raise ValueError(f"noise correlation c must lie in [-1, 1], got {self.c}")


def resonance_holds(model: "CorrelatedLinearModel", rel_tol: float = 1e-9) -> bool:
    """True when V0*p - a*c*q vanishes within rel_tol."""
    lhs = model.V0 * model.p - model.a * model.c * model.q
    scale = max(abs(model.V0 * model.p), abs(model.a * model.c * model.q), 1.0)
    return abs(lhs) <= rel_tol * scale


@dataclass(frozen=True)
class ShiftedCorrelatedLinearModel(CorrelatedLinearModel):
    """Equilibrium-shifted rewriting of the correlated linear model.

    Algebraically identical to CorrelatedLinearModel when the matched-noise
    condition V0*p = a*c*q holds; the rewriting folds the additive
    correlated part of the noise into the multiplicative coefficient, which
    then reads -p*(G - V0/a). Construction is refused off that condition
    because the two forms cease to be the same process there.
    """

    def __post_init__(self) -> None:
        super().__post_init__()
        if not resonance_holds(self):
            raise ValueError(
                "shifted form requires the matched-noise condition V0*p = a*c*q"
            )


@dataclass(frozen=True)
class MonostablePowerModel:
    """Single-well power-law model with the correlated noise structure.

    The deterministic part relaxes as -a*G**(2n-1) + V0. n=1 is rejected:
    that case is CorrelatedLinearModel. n is capped at 6; steeper wells are
    numerically brittle at the default step size.
    """

    family: ClassVar[str] = "monostable_power"

    a: float
    V0: float
    p: float
    q: float
    c: float
    n: int
    drive: DriveSignal

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"relaxation rate a must be > 0, got {self.a}")
        if not self.p >= 0.0:
            raise ValueError(f"multiplicative noise strength p must be >= 0, got {self.p}")
        if not self.q >= 0.0:
            raise ValueError(f"additive noise strength q must be >= 0, got {self.q}")
        if not -1.0 <= self.c <= 1.0:
            raise ValueError(f"noise correlation c must lie in [-1, 1], got {self.c}")
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise ValueError(f"well exponent n must be an integer, got {self.n!r}")
        if self.n < 2 or self.n > 6:
            raise ValueError(f"well exponent n must lie in [2, 6], got {self.n}")

    @property
    def power(self) -> int:
        """Exponent of G in the drift, 2n-1."""
        return 2 * self.n - 1


ModelSpec = Union[
    TimeDelayModel,
    DoubleWellModel,
    CorrelatedLinearModel,
    MonostablePowerModel,
]


def drive_voltage(drive: DriveSignal, t, phi=None):
    """Instantaneous drive voltage; phi overrides the drive's phase if given.

    The override exists so an ensemble with one phase per realization can
    evaluate the drive for all realizations in a single vector operation.
    """
    ph = drive.phi if phi is None else phi
    return drive.V1 * np.cos(drive.omega * np.asarray(t, dtype=float) + ph)


def _as_float_if_scalar(x, scalar_in: bool):
    return float(x) if scalar_in else x


def autonomous_drift(model: ModelSpec, G):
    """Drift without the drive term. Broadcasts over G."""
    G = np.asarray(G, dtype=float)
    if isinstance(model, (TimeDelayModel, CorrelatedLinearModel)):
        return -model.a * G + model.V0
    if isinstance(model, DoubleWellModel):
        return -potential_slope(G)
    if isinstance(model, MonostablePowerModel):
        return -model.a * G ** model.power + model.V0
    raise TypeError(f"unknown model type {type(model).__name__}")


def drift(model: ModelSpec, G, t):
    """Deterministic part of dG/dt at state G and time t."""
    scalar = np.isscalar(G) and np.isscalar(t)
    value = autonomous_drift(model, G) + drive_voltage(model.drive, t)
    return _as_float_if_scalar(value, scalar)


def diffusion(model: ModelSpec, G):
    """Coefficients (g_xi, g_eta) of the two independent noise sources.

    g_xi multiplies the source that also appears multiplicatively; g_eta
    multiplies the independent remainder of the additive source. For the
    noise-free and additive-only families one or both coefficients are
    constant.
    """
    scalar = np.isscalar(G)
    G = np.asarray(G, dtype=float)
    if isinstance(model, ShiftedCorrelatedLinearModel):
        g_xi = -model.p * (G - model.V0 / model.a)
        g_eta = model.q * math.sqrt(max(0.0, 1.0 - model.c * model.c))
        return _as_float_if_scalar(g_xi, scalar), g_eta
    if isinstance(model, CorrelatedLinearModel):
        g_xi = -model.p * G + model.q * model.c
        g_eta = model.q * math.sqrt(max(0.0, 1.0 - model.c * model.c))
        return _as_float_if_scalar(g_xi, scalar), g_eta
    if isinstance(model, MonostablePowerModel):
        g_xi = -model.p * G ** model.power + model.q * model.c
        g_eta = model.q * math.sqrt(max(0.0, 1.0 - model.c * model.c))
        return _as_float_if_scalar(g_xi, scalar), g_eta
    if isinstance(model, DoubleWellModel):
        return model.sigma, 0.0
    if isinstance(model, TimeDelayModel):
        return 0.0, 0.0
    raise TypeError(f"unknown model type {type(model).__name__}")


def stratonovich_correction(model: ModelSpec, G):
    """Drift term 0.5*g_xi*(d g_xi/dG) converting a Stratonovich reading
    of the state-dependent noise into an equivalent Ito drift.

    Zero for the additive-noise and noise-free families. g_eta never
    depends on G, so it contributes nothing.
    """
    scalar = np.isscalar(G)
    G = np.asarray(G, dtype=float)
    if isinstance(model, ShiftedCorrelatedLinearModel):
        value = 0.5 * (-model.p * (G - model.V0 / model.a)) * (-model.p)
        return _as_float_if_scalar(value, scalar)
    if isinstance(model, CorrelatedLinearModel):
        value = 0.5 * (-model.p * G + model.q * model.c) * (-model.p)
        return _as_float_if_scalar(value, scalar)
    if isinstance(model, MonostablePowerModel):
        m = model.power
        g_xi = -model.p * G ** m + model.q * model.c
        dg = -model.p * m * G ** (m - 1)
        return _as_float_if_scalar(0.5 * g_xi * dg, scalar)
    if isinstance(model, (DoubleWellModel, TimeDelayModel)):
        return _as_float_if_scalar(np.zeros_like(G), scalar)
    raise TypeError(f"unknown model type {type(model).__name__}")


def current(G, t, drive: DriveSignal, phi=None):
    """Device current I = G * V(t).

    Computed literally as the product, so the current is exactly zero at
    any sample where the voltage is exactly zero, whatever G is. That makes
    hysteresis loops in the (V, I) plane pinched at the origin by
    construction.
    """
    scalar = np.isscalar(G) and np.isscalar(t)
    value = np.asarray(G, dtype=float) * drive_voltage(drive, t, phi=phi)
    return _as_float_if_scalar(value, scalar)


# -- fixed double-well potential ------------------------------------------

_WELL_CENTER = 2.0


def potential_value(G):
    """Tilted quartic potential of the double-well family."""
    scalar = np.isscalar(G)
    u = np.asarray(G, dtype=float) - _WELL_CENTER
    value = 0.25 * u ** 4 - 0.5 * u ** 2 - 0.125 * u
    return _as_float_if_scalar(value, scalar)


def potential_slope(G):
    """dV/dG of the double-well potential."""
    scalar = np.isscalar(G)
    u = np.asarray(G, dtype=float) - _WELL_CENTER
    value = u ** 3 - u - 0.125
    return _as_float_if_scalar(value, scalar)


@lru_cache(maxsize=1)
def stationary_points() -> tuple[float, float, float]:
    """Roots of dV/dG: (left minimum, barrier top, right minimum).

    Found by bracketed root finding on the cubic; the slope at each
    reported point is below 1e-12 in magnitude.
    """

    def slope_of_u(u: float) -> float:
        return u ** 3 - u - 0.125

    brackets = [(-1.5, -0.5), (-0.5, 0.0), (0.5, 1.5)]
    roots = [brentq(slope_of_u, lo, hi, xtol=1e-15, rtol=8.9e-16) for lo, hi in brackets]
    return tuple(_WELL_CENTER + u for u in roots)  # type: ignore[return-value]


def well_depths() -> tuple[float, float]:
    """Barrier heights (U_left, U_right) seen from each minimum."""
    left, barrier, right = stationary_points()
    vb = potential_value(barrier)
    return vb - potential_value(left), vb - potential_value(right)


def w_polynomial(n: int, V0: float, a: float, y):
    """Polynomial factor W(y) in the shifted form of the power-law model.

    Shifting the state by the deterministic fixed point r = (V0/a)**(1/(2n-1))
    turns the relaxation term into -a*y*W(y), where

        W(y) = sum_{l=0}^{2(n-1)} C(2n-1, l+1) * y**l * (V0/a)**(1-(l+1)/(2n-1))

    and C is the binomial coefficient. The defining identity is
    y*W(y) = (y+r)**(2n-1) - r**(2n-1).
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n > 6:
        raise ValueError(f"well exponent n must be an integer in [2, 6], got {n!r}")
    ratio = V0 / a
    if not ratio > 0.0:
        raise ValueError(f"V0/a must be > 0 for the shifted form, got {ratio}")
    scalar = np.isscalar(y)
    y = np.asarray(y, dtype=float)
    m = 2 * n - 1
    total = np.zeros_like(y)
    for l in range(2 * n - 1):
        coeff = math.comb(m, l + 1) * ratio ** (1.0 - (l + 1) / m)
        total = total + coeff * y ** l
    return _as_float_if_scalar(total, scalar)


def default_initial_state(model: ModelSpec) -> float:
    """Conventional starting point: the left minimum for the double well,
    zero for everything else."""
    if isinstance(model, DoubleWellModel):
        return stationary_points()[0]
    return 0.0
