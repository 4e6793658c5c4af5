"""Trajectory-level analysis: hysteresis loops, dwell times, plateaus.

Hysteresis loops live in the (V, I) plane. Because the current is computed
as I = G*V, every sample with V exactly zero has I exactly zero, so loops
are pinched at the origin by construction. Loop area uses the shoelace
formula on each period's samples with the polygon closed on itself;
counterclockwise circulation counts positive.

Dwell times for the double well use hysteretic two-threshold counting: the
trajectory must leave a band of half-width delta around the barrier top
before a well change is registered, which keeps barrier-grazing jitter from
being counted as switching. The first and last intervals are censored by
the record boundaries but are still included, matching the convention that
a crossing-free record is a single dwell.

The plateau decomposition splits a record G into its time average and the
fluctuation gamma = G - mean, and checks the exact estimator identity
relating the raw and centered lagged products. The identity includes the
finite-record cross terms, so the reconstruction error is pure floating
point rounding on any record, long or short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import stationary_points
from .integrate import Trajectory
from .spectral import _biased_acf

__all__ = [
    "DEFAULT_DEADBAND",
    "HysteresisLoop",
    "DwellStats",
    "PlateauResult",
    "extract_loops",
    "loop_area",
    "dwell_times",
    "plateau_decomposition",
]

DEFAULT_DEADBAND = 0.1


@dataclass(frozen=True, eq=False)
class HysteresisLoop:
    """One drive period of the (V, I) trace with its signed area."""

    period_index: int
    voltage: np.ndarray
    current: np.ndarray
    area: float


def loop_area(voltage: np.ndarray, current: np.ndarray) -> float:
    """Signed shoelace area of the closed polygon, counterclockwise positive."""
    v = np.asarray(voltage, dtype=float)
    i = np.asarray(current, dtype=float)
    if v.shape != i.shape or v.ndim != 1 or v.size < 3:
        raise ValueError("need matching 1-d arrays of at least 3 samples")
    v_next = np.roll(v, -1)
    i_next = np.roll(i, -1)
    return 0.5 * float(np.sum(v * i_next - v_next * i))


def extract_loops(trajectory: Trajectory, start_period: int = 0, n_periods: int | None = None) -> list[HysteresisLoop]:
    """Per-period hysteresis loops of a trajectory.

    Each loop takes its period's samples (the sample that opens the next
    period is not duplicated into the previous loop).
    """
    total = trajectory.whole_periods()
    if n_periods is None:
        n_periods = total - start_period
    if n_periods < 1 or start_period < 0 or start_period + n_periods > total:
        raise ValueError(
            f"requested periods [{start_period}, {start_period + n_periods}) outside "
            f"the record's {total} whole periods"
        )
    spp = trajectory.samples_per_period()
    voltage = trajectory.drive_values()
    current = trajectory.current_values()
    loops = []
    for j in range(start_period, start_period + n_periods):
        sel = slice(j * spp, (j + 1) * spp)
        v = voltage[sel]
        i = current[sel]
        loops.append(
            HysteresisLoop(period_index=j, voltage=v, current=i, area=loop_area(v, i))
        )
    return loops


@dataclass(frozen=True, eq=False)
class DwellStats:
    """Hysteretic dwell-time statistics of a double-well trajectory."""

    tau_left: np.ndarray
    tau_right: np.ndarray
    mean_left: float
    mean_right: float
    threshold_low: float
    threshold_high: float
    n_crossings: int
    no_crossings: bool


def dwell_times(trajectory: Trajectory, delta: float = DEFAULT_DEADBAND) -> DwellStats:
    """Dwell intervals in each well, two-threshold counting around the barrier.

    A sample counts as being in a well only beyond barrier +/- delta; the
    well in force persists through the dead band. Intervals shorter than
    one recording step cannot occur by construction and zero-length
    boundary leftovers are dropped. A record that never leaves its first
    well yields that record's full span as a single dwell, flagged via
    no_crossings.
    """
    if not delta > 0.0:
        raise ValueError(f"deadband half-width must be > 0, got {delta}")
    barrier = stationary_points()[1]
    lo = barrier - delta
    hi = barrier + delta
    g = trajectory.samples
    t = trajectory.times()
    side = np.zeros(g.size, dtype=np.int8)
    side[g > hi] = 1
    side[g < lo] = -1
    classified = np.nonzero(side)[0]
    if classified.size == 0:
        raise ValueError(
            "trajectory never leaves the dead band; widen the record or shrink delta"
        )
    labels = side[classified]
    changes = np.nonzero(labels[:-1] != labels[1:])[0]
    # crossing sample: first classified sample on the new side
    crossing_idx = classified[changes + 1]
    span = float(t[-1] - t[0])
    if crossing_idx.size == 0:
        tau = np.array([span])
        first_label = labels[0]
        left = tau if first_label < 0 else np.array([])
        right = tau if first_label > 0 else np.array([])
        return DwellStats(
            tau_left=left,
            tau_right=right,
            mean_left=float(np.mean(left)) if left.size else math.nan,
            mean_right=float(np.mean(right)) if right.size else math.nan,
            threshold_low=lo,
            threshold_high=hi,
            n_crossings=0,
            no_crossings=True,
        )
    bounds = np.concatenate(([t[0]], t[crossing_idx], [t[-1]]))
    durations = np.diff(bounds)
    # label of segment m is the side in force before the m-th crossing
    segment_labels = np.concatenate(([labels[0]], labels[changes + 1]))
    step = t[1] - t[0] if t.size > 1 else 0.0
    keep = durations >= 0.5 * step
    durations = durations[keep]
    segment_labels = segment_labels[keep]
    left = durations[segment_labels < 0]
    right = durations[segment_labels > 0]
    return DwellStats(
        tau_left=left,
        tau_right=right,
        mean_left=float(np.mean(left)) if left.size else math.nan,
        mean_right=float(np.mean(right)) if right.size else math.nan,
        threshold_low=lo,
        threshold_high=hi,
        n_crossings=int(crossing_idx.size),
        no_crossings=False,
    )


@dataclass(frozen=True, eq=False)
class PlateauResult:
    """Time average, fluctuation autocorrelation and identity residual."""

    g_tilde: float
    lags: np.ndarray
    gamma_acf: np.ndarray
    reconstruction_error: float


def plateau_decomposition(record: np.ndarray, max_lag: int, dt_sample: float = 1.0) -> PlateauResult:
    """Split a record into time average plus fluctuations and verify the
    lagged-product identity.

    For each lag the raw lagged product of G equals the centered one plus
    g_tilde times the head and tail partial means of the fluctuation plus
    g_tilde**2 scaled by the pair count. The reported reconstruction_error
    is the largest absolute residual of that identity over the lag range;
    it is rounding noise by construction.
    """
    record = np.asarray(record, dtype=float)
    if record.ndim != 1 or record.size < 4:
        raise ValueError("record must be a 1-d array with at least 4 samples")
    if not isinstance(max_lag, int) or max_lag < 0 or max_lag > record.size // 4:
        raise ValueError(
            f"max_lag must be an integer in [0, {record.size // 4}], got {max_lag!r}"
        )
    n = record.size
    g_tilde = float(record.mean())
    gamma = record - g_tilde
    gamma_acf = _biased_acf(gamma, max_lag)
    raw_acf = _biased_acf(record, max_lag)
    csum = np.concatenate(([0.0], np.cumsum(gamma)))
    total = csum[-1]
    lags = np.arange(max_lag + 1)
    head = csum[n - lags] / n
    tail = (total - csum[lags]) / n
    pair_fraction = (n - lags) / n
    residual = raw_acf - (gamma_acf + g_tilde * (head + tail) + g_tilde * g_tilde * pair_fraction)
    return PlateauResult(
        g_tilde=g_tilde,
        lags=lags * dt_sample,
        gamma_acf=gamma_acf,
        reconstruction_error=float(np.max(np.abs(residual))),
    )
