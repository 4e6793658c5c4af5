"""Periodogram, spectrum averaging, signal-to-noise ratio, autocorrelation.

Normalization, stated once and used everywhere: the periodogram is the
one-sided power spectral density

    P[k] = w_k * |X[k]|**2 * dt / N,   X = DFT(record - mean(record))

where w_k doubles every bin except DC and (for even N) the Nyquist bin.
With the frequency bin width 1/(N*dt) this satisfies Parseval exactly:
sum(P) / (N*dt) equals the mean square of the mean-removed record. Two
consequences used by the tests: a bin-aligned cosine of amplitude A peaks
at A**2 * N * dt / 2, and white noise of variance v averages 2*v*dt per
bin.

The analysis window is rectangular. Records are expected to cover a whole
number of drive periods (at least two) so the drive line is bin-aligned
and leaks nowhere; pass the drive period to have that checked.

The SNR estimator takes the power in the drive bin against the median of
the surrounding bins, excluding the peak neighborhood and any drive
harmonics that fall inside the window. A background at or below the
floating-point floor is reported as a flag, not as a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PsdEstimate",
    "SnrResult",
    "periodogram",
    "averaged_psd",
    "snr",
    "autocorrelation",
]

BACKGROUND_WINDOW = 32  # bins each side of the peak
PEAK_EXCLUSION = 2  # bins each side of peak and harmonics left out of the background


@dataclass(frozen=True, eq=False)
class PsdEstimate:
    """One-sided power spectral density on a uniform frequency grid."""

    freq: np.ndarray
    power: np.ndarray
    n_samples: int
    dt_sample: float
    realization_count: int
    window: str

    @property
    def bin_width(self) -> float:
        return 1.0 / (self.n_samples * self.dt_sample)


@dataclass(frozen=True)
class SnrResult:
    """Drive-line signal-to-noise ratio in decibels.

    snr_db is always 10*log10(peak_power/background_power) of the stored
    fields; when background_is_zero it is inf (or NaN for an all-zero
    spectrum) and the ratio is meaningless.
    """

    snr_db: float
    peak_power: float
    background_power: float
    peak_bin: int
    window_bins: int
    exclusion_bins: int
    window_clipped: bool
    background_is_zero: bool


def periodogram(record: np.ndarray, dt_sample: float, drive_period: float | None = None) -> PsdEstimate:
    """One-sided PSD of a single record under the module normalization.

    If drive_period is given, the record must cover a whole number >= 2 of
    periods; per-period coverage is what keeps the drive line on a bin.
    """
    record = np.asarray(record, dtype=float)
    if record.ndim != 1 or record.size < 2:
        raise ValueError("record must be a 1-d array with at least 2 samples")
    if not dt_sample > 0.0:
        raise ValueError(f"dt_sample must be > 0, got {dt_sample}")
    if not np.all(np.isfinite(record)):
        raise ValueError("record contains non-finite samples")
    n = record.size
    if drive_period is not None:
        covered = n * dt_sample / drive_period
        if abs(covered - round(covered)) > 1e-9 * max(covered, 1.0) or round(covered) < 2:
            raise ValueError(
                f"record covers {covered!r} drive periods; need a whole number >= 2"
            )
    x = record - record.mean()
    spectrum = np.fft.rfft(x)
    power = (spectrum.real ** 2 + spectrum.imag ** 2) * (dt_sample / n)
    power[1:] *= 2.0
    if n % 2 == 0:
        power[-1] *= 0.5
    freq = np.fft.rfftfreq(n, d=dt_sample)
    return PsdEstimate(
        freq=freq,
        power=power,
        n_samples=n,
        dt_sample=dt_sample,
        realization_count=1,
        window="rectangular, mean removed",
    )


def averaged_psd(estimates: list[PsdEstimate]) -> PsdEstimate:
    """Pointwise average of PSDs on identical grids.

    Realization counts add, so averages of averages weight correctly only
    when the inputs carry their own counts.
    """
    if not estimates:
        raise ValueError("need at least one estimate to average")
    first = estimates[0]
    total = np.zeros_like(first.power)
    count = 0
    for est in estimates:
        if est.n_samples != first.n_samples or est.dt_sample != first.dt_sample:
            raise ValueError("estimates lie on different frequency grids")
        if not np.array_equal(est.freq, first.freq):
            raise ValueError("estimates lie on different frequency grids")
        total += est.power * est.realization_count
        count += est.realization_count
    return PsdEstimate(
        freq=first.freq.copy(),
        power=total / count,
        n_samples=first.n_samples,
        dt_sample=first.dt_sample,
        realization_count=count,
        window=first.window,
    )


def snr(
    psd: PsdEstimate,
    omega: float,
    window_bins: int = BACKGROUND_WINDOW,
    exclusion_bins: int = PEAK_EXCLUSION,
    harmonics: tuple[int, ...] = (2, 3),
) -> SnrResult:
    """SNR of the drive line at angular frequency omega.

    The drive frequency omega/(2*pi) must land on a grid bin. Background
    bins are taken window_bins either side of the peak, dropping the peak
    and its exclusion_bins neighbors, the listed harmonics of the drive
    with the same exclusion margin, and bin 0 (mean removal pins it near
    zero, which would drag the median down). The window is clipped at the
    grid edges and flagged when that happens.
    """
    if window_bins < exclusion_bins + 1:
        raise ValueError("background window must extend beyond the exclusion zone")
    f0 = omega / (2.0 * math.pi)
    ratio = f0 / psd.bin_width
    k0 = round(ratio)
    if abs(ratio - k0) > 1e-9 * max(ratio, 1.0):
        raise ValueError(
            f"drive frequency {f0!r} does not land on the frequency grid "
            f"(bin width {psd.bin_width!r})"
        )
    n_bins = psd.power.size
    if k0 < 1 or k0 >= n_bins:
        raise ValueError(f"drive bin {k0} outside the spectrum (0, {n_bins})")
    lo = k0 - window_bins
    hi = k0 + window_bins
    clipped = lo < 1 or hi > n_bins - 1
    lo = max(lo, 1)
    hi = min(hi, n_bins - 1)
    candidates = np.arange(lo, hi + 1)
    keep = np.abs(candidates - k0) > exclusion_bins
    for m in harmonics:
        keep &= np.abs(candidates - m * k0) > exclusion_bins
    candidates = candidates[keep]
    if candidates.size == 0:
        raise ValueError("background window contains no usable bins")
    peak = float(psd.power[k0])
    background = float(np.median(psd.power[candidates]))
    zero_floor = background <= 0.0 or background < peak * 1e-12
    if zero_floor:
        value = math.inf if peak > 0.0 else math.nan
    else:
        value = 10.0 * math.log10(peak / background)
    return SnrResult(
        snr_db=value,
        peak_power=peak,
        background_power=background,
        peak_bin=int(k0),
        window_bins=window_bins,
        exclusion_bins=exclusion_bins,
        window_clipped=clipped,
        background_is_zero=zero_floor,
    )


def _biased_acf(values: np.ndarray, max_lag: int) -> np.ndarray:
    """Lag 0..max_lag autocovariances with the 1/N divisor, via FFT."""
    n = values.size
    padded = np.zeros(2 ** int(math.ceil(math.log2(2 * n))))
    padded[:n] = values
    spectrum = np.fft.rfft(padded)
    corr = np.fft.irfft(spectrum.real ** 2 + spectrum.imag ** 2)
    return corr[: max_lag + 1] / n


def autocorrelation(record: np.ndarray, dt_sample: float, max_lag: int) -> tuple[np.ndarray, np.ndarray]:
    """Biased autocorrelation of the mean-removed record.

    Returns (lag times, values); values[0] is the record's variance with
    the 1/N divisor. max_lag may not exceed a quarter of the record; the
    biased estimator degrades beyond that.
    """
    record = np.asarray(record, dtype=float)
    if record.ndim != 1 or record.size < 4:
        raise ValueError("record must be a 1-d array with at least 4 samples")
    if not isinstance(max_lag, int) or max_lag < 0:
        raise ValueError(f"max_lag must be a nonnegative integer, got {max_lag!r}")
    if max_lag > record.size // 4:
        raise ValueError(
            f"max_lag {max_lag} exceeds a quarter of the record ({record.size // 4})"
        )
    centered = record - record.mean()
    values = _biased_acf(centered, max_lag)
    lags = np.arange(max_lag + 1) * dt_sample
    return lags, values
