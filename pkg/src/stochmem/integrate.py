"""Fixed-step stochastic integrators for the model families.

Three schemes are provided. euler_maruyama is the plain explicit step and
converges to the Ito reading of state-dependent noise. heun is a
predictor-corrector that averages drift and diffusion over the step using
the same noise increments in both stages; it converges to the Stratonovich
reading, which is the one under which the oracle module's closed forms
hold. euler_drift_corrected adds the analytic conversion term
0.5*g_xi*(d g_xi/dG)*dt to the Euler drift and is the cheap route to the
same Stratonovich statistics.

The step size is fixed; the default, 1/256 of a unit drive period, is a
power of two so that times on the grid are exact floats. Recording may be
strided, but the recording interval dt*stride must tile the drive period
exactly so every period holds the same number of samples.

A state that leaves the floating-point range aborts the trajectory with
the blow-up time in the exception; nothing is clamped or retried.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ModelSpec,
    autonomous_drift,
    current,
    default_initial_state,
    diffusion,
    drive_voltage,
    stratonovich_correction,
)
from .noise import NoiseStream, gaussian_increments

__all__ = [
    "DEFAULT_DT",
    "Scheme",
    "BlowUpError",
    "Trajectory",
    "step",
    "integrate",
    "samples_per_period",
]

DEFAULT_DT = 1.0 / 256.0

_NOISE_BLOCK = 8192  # steps of increments drawn per request; bounds memory only


class Scheme(enum.Enum):
    EULER_MARUYAMA = "euler_maruyama"
    HEUN_STRATONOVICH = "heun"
    EULER_DRIFT_CORRECTED = "euler_drift_corrected"

    @classmethod
    def from_name(cls, name: str) -> "Scheme":
        for member in cls:
            if member.value == name:
                return member
        names = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown scheme {name!r}; expected one of: {names}")


class BlowUpError(RuntimeError):
    """Trajectory left the floating-point range."""

    def __init__(self, t: float, step_index: int, realization: int | None = None):
        self.t = t
        self.step_index = step_index
        self.realization = realization
        where = f" (realization {realization})" if realization is not None else ""
        super().__init__(f"state became non-finite at t={t:.6g}, step {step_index}{where}")


def _step_kernel(scheme: Scheme, model: ModelSpec, G, t, dW_xi, dW_eta, dt, phi=None):
    """One update on array state. Shared by the scalar and batched paths so
    both produce bit-identical values."""
    drive = model.drive
    if scheme is Scheme.HEUN_STRATONOVICH:
        f0 = autonomous_drift(model, G) + drive_voltage(drive, t, phi)
        g0_xi, g0_eta = diffusion(model, G)
        predictor = G + f0 * dt + g0_xi * dW_xi + g0_eta * dW_eta
        f1 = autonomous_drift(model, predictor) + drive_voltage(drive, t + dt, phi)
        g1_xi, g1_eta = diffusion(model, predictor)
        return G + 0.5 * (
            (f0 + f1) * dt + (g0_xi + g1_xi) * dW_xi + (g0_eta + g1_eta) * dW_eta
        )
    f = autonomous_drift(model, G) + drive_voltage(drive, t, phi)
    if scheme is Scheme.EULER_DRIFT_CORRECTED:
        f = f + stratonovich_correction(model, G)
    g_xi, g_eta = diffusion(model, G)
    return G + f * dt + g_xi * dW_xi + g_eta * dW_eta


def step(scheme: Scheme, model: ModelSpec, G, t, dW_xi, dW_eta, dt):
    """Advance the state by one step of the chosen scheme."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    scalar = np.isscalar(G)
    out = _step_kernel(scheme, model, np.asarray(G, dtype=float), t, dW_xi, dW_eta, dt)
    return float(out) if scalar else out


def samples_per_period(drive_period: float, dt: float, stride: int) -> int:
    """Samples of the recording grid per drive period.

    The recording interval dt*stride must tile the period exactly
    (to 1e-9 relative); anything else makes per-period analysis ambiguous.
    """
    ratio = drive_period / (dt * stride)
    nearest = round(ratio)
    if nearest < 1 or abs(ratio - nearest) > 1e-9 * max(ratio, 1.0):
        raise ValueError(
            f"recording interval dt*stride = {dt * stride!r} does not tile the "
            f"drive period {drive_period!r} (ratio {ratio!r})"
        )
    return nearest


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One recorded realization.

    samples holds G on the recording grid t0 + j*stride*dt, including the
    initial state. The model reference carries the exact drive phase this
    realization ran with, and the stream indices plus base seed are enough
    to replay it bit for bit.
    """

    model: ModelSpec
    scheme: Scheme
    t0: float
    dt: float
    stride: int
    samples: np.ndarray
    base_seed: int
    xi_index: int
    eta_index: int

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) * (self.dt * self.stride)

    def drive_values(self) -> np.ndarray:
        return drive_voltage(self.model.drive, self.times())

    def current_values(self) -> np.ndarray:
        return current(self.samples, self.times(), self.model.drive)

    def samples_per_period(self) -> int:
        return samples_per_period(self.model.drive.period, self.dt, self.stride)

    def whole_periods(self) -> int:
        return (self.samples.size - 1) // self.samples_per_period()

    def period_slice(self, start_period: int, n_periods: int) -> slice:
        """Index slice covering n_periods whole periods from start_period.

        The slice has n_periods*spp points; the sample closing the last
        period is excluded, so consecutive windows do not overlap.
        """
        spp = self.samples_per_period()
        lo = start_period * spp
        hi = lo + n_periods * spp
        if start_period < 0 or n_periods < 1 or hi > self.samples.size:
            raise ValueError(
                f"window of {n_periods} periods from period {start_period} does not "
                f"fit a record of {self.whole_periods()} whole periods"
            )
        return slice(lo, hi)


def _resolve_steps(t_end: float, dt: float, stride: int) -> int:
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not isinstance(stride, int) or stride < 1:
        raise ValueError(f"stride must be a positive integer, got {stride!r}")
    if not t_end > 0.0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    n_steps = math.ceil(t_end / dt - 1e-9)
    if n_steps % stride != 0:
        raise ValueError(
            f"step count {n_steps} is not a multiple of stride {stride}; "
            "adjust t_end or stride"
        )
    return n_steps


def _simulate_batch(
    model: ModelSpec,
    scheme: Scheme,
    n_steps: int,
    dt: float,
    stride: int,
    stream_pairs: list[tuple[NoiseStream, NoiseStream]],
    initial: float,
    phi=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance a batch of realizations on a shared time grid.

    Returns (samples, aborted_step): samples has shape (batch, records)
    with NaN after a lane's blow-up point; aborted_step is -1 for lanes
    that finished, otherwise the 1-based step index where the state first
    went non-finite. Aborted lanes are parked at zero internally so the
    rest of the batch keeps stepping, and their parked values are never
    recorded.
    """
    batch = len(stream_pairs)
    n_records = n_steps // stride
    G = np.full(batch, float(initial))
    samples = np.empty((batch, n_records + 1))
    samples[:, 0] = G
    aborted_step = np.full(batch, -1, dtype=np.int64)
    parked = None
    done = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while done < n_steps:
            block = min(_NOISE_BLOCK, n_steps - done)
            dW_xi = np.stack([gaussian_increments(sx, block, dt) for sx, _ in stream_pairs])
            dW_eta = np.stack([gaussian_increments(se, block, dt) for _, se in stream_pairs])
            for j in range(block):
                t = (done + j) * dt
                G = _step_kernel(scheme, model, G, t, dW_xi[:, j], dW_eta[:, j], dt, phi)
                if parked is not None:
                    G[parked] = 0.0
                fresh_bad = ~np.isfinite(G)
                if fresh_bad.any():
                    fresh_bad &= aborted_step < 0
                    aborted_step[fresh_bad] = done + j + 1
                    parked = aborted_step >= 0
                    G[parked] = 0.0
                k = done + j + 1
                if k % stride == 0:
                    samples[:, k // stride] = G
            done += block
    for lane in np.nonzero(aborted_step >= 0)[0]:
        first_bad_record = (int(aborted_step[lane]) + stride - 1) // stride
        samples[lane, first_bad_record:] = np.nan
    return samples, aborted_step


def integrate(
    model: ModelSpec,
    scheme: Scheme,
    t_end: float,
    stream_xi: NoiseStream,
    stream_eta: NoiseStream,
    dt: float = DEFAULT_DT,
    stride: int = 1,
    initial: float | None = None,
) -> Trajectory:
    """Integrate one realization from t=0 to t_end.

    Consumes exactly ceil(t_end/dt) increments from each of the two
    streams regardless of the model family, so replay bookkeeping is
    family-independent. Raises BlowUpError if the state leaves the
    floating-point range.
    """
    n_steps = _resolve_steps(t_end, dt, stride)
    samples_per_period(model.drive.period, dt, stride)
    if initial is None:
        initial = default_initial_state(model)
    samples, aborted_step = _simulate_batch(
        model, scheme, n_steps, dt, stride, [(stream_xi, stream_eta)], initial
    )
    if aborted_step[0] >= 0:
        bad = int(aborted_step[0])
        raise BlowUpError(t=bad * dt, step_index=bad)
    return Trajectory(
        model=model,
        scheme=scheme,
        t0=0.0,
        dt=dt,
        stride=stride,
        samples=samples[0],
        base_seed=stream_xi.base_seed,
        xi_index=stream_xi.stream_index,
        eta_index=stream_eta.stream_index,
    )
