"""Ensembles of independent realizations with deterministic aggregation.

Realizations are numbered 0..N-1 and each owns its noise streams (see the
noise module layout), so the ensemble is defined entirely by the model,
scheme, grid and base seed. Work is split into fixed chunks of CHUNK_SIZE
consecutive realizations; chunks may run in parallel worker processes, but
chunk boundaries and all reduction orders depend only on N, never on the
worker count or completion order. Together with lane-exact vectorized
stepping this makes every aggregate bit-identical for any --workers value,
which is a promise the command-line layer's reproducibility contract leans
on.

Pointwise mean and variance accumulate with Welford updates inside a chunk
(realization order) and Chan merging across chunks (chunk order); both are
numerically stable and deterministic. Variance is the population variance,
so a single-realization ensemble reports exactly zero; the standard error
of the mean uses the N-1 divisor and is NaN for N=1.

Realizations whose state blows up are excluded from every aggregate and
reported in the result's aborted list. An ensemble where every realization
aborts raises EnsembleError.

Full trajectories are discarded by default; retain_trajectories keeps them
(memory scales as realizations x samples). A periodogram of the device
current over a stated window of whole drive periods can be accumulated on
the fly, averaged over surviving realizations.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from multiprocessing import get_context

import numpy as np

from .core import (
    CorrelatedLinearModel,
    ModelSpec,
    MonostablePowerModel,
    current,
    default_initial_state,
)
from .integrate import Scheme, Trajectory, _resolve_steps, _simulate_batch, samples_per_period
from .noise import streams_for, uniform_angles
from .spectral import PsdEstimate, periodogram

__all__ = [
    "CHUNK_SIZE",
    "EnsembleError",
    "AbortRecord",
    "RealizationRecord",
    "EnsembleResult",
    "run_ensemble",
]

CHUNK_SIZE = 128  # realizations per work unit; fixed so reductions never move


class EnsembleError(RuntimeError):
    pass


@dataclass(frozen=True)
class AbortRecord:
    """Blow-up diagnostic for one realization."""

    realization: int
    step_index: int
    t: float


@dataclass(frozen=True)
class RealizationRecord:
    """Replay bookkeeping: the streams and drive phase a realization used."""

    realization: int
    xi_index: int
    eta_index: int
    phase_index: int
    phi: float


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    model: ModelSpec
    scheme: Scheme
    dt: float
    stride: int
    t_end: float
    base_seed: int
    n_realizations: int
    n_effective: int
    times: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    stderr: np.ndarray
    aborted: tuple[AbortRecord, ...]
    records: tuple[RealizationRecord, ...]
    trajectories: tuple[Trajectory, ...] | None
    psd: PsdEstimate | None
    psds: tuple[PsdEstimate, ...] | None
    psd_window: tuple[int, int] | None

    def post_transient(self, transient_periods: int) -> np.ndarray:
        """Boolean mask of recorded samples at or after the given period."""
        spp = samples_per_period(self.model.drive.period, self.dt, self.stride)
        return np.arange(self.times.size) >= transient_periods * spp


@dataclass
class _ChunkTask:
    model: ModelSpec
    scheme: Scheme
    n_steps: int
    dt: float
    stride: int
    base_seed: int
    start: int
    stop: int
    randomize_phase: bool
    initial: float
    psd_start_sample: int | None
    psd_n_samples: int | None
    retain_trajectories: bool
    retain_psds: bool


@dataclass
class _ChunkResult:
    start: int
    count: int
    mean: np.ndarray | None
    m2: np.ndarray | None
    psd_sum: np.ndarray | None
    psd_count: int
    freq: np.ndarray | None
    aborted: list[AbortRecord]
    records: list[RealizationRecord]
    trajectories: list[Trajectory] | None
    psds: list[PsdEstimate] | None


def _chunk_worker(task: _ChunkTask) -> _ChunkResult:
    lanes = range(task.start, task.stop)
    stream_pairs = []
    phis = []
    records = []
    for k in lanes:
        xi, eta, phase = streams_for(task.base_seed, k)
        stream_pairs.append((xi, eta))
        if task.randomize_phase:
            phi_k = float(uniform_angles(phase, 1)[0])
        else:
            phi_k = task.model.drive.phi
        phis.append(phi_k)
        records.append(
            RealizationRecord(
                realization=k,
                xi_index=xi.stream_index,
                eta_index=eta.stream_index,
                phase_index=phase.stream_index,
                phi=phi_k,
            )
        )
    phi_vec = np.asarray(phis)
    samples, aborted_step = _simulate_batch(
        task.model,
        task.scheme,
        task.n_steps,
        task.dt,
        task.stride,
        stream_pairs,
        task.initial,
        phi=phi_vec,
    )
    n_records = samples.shape[1]
    times = np.arange(n_records) * (task.dt * task.stride)

    count = 0
    mean = np.zeros(n_records)
    m2 = np.zeros(n_records)
    psd_sum = None
    psd_count = 0
    freq = None
    aborted: list[AbortRecord] = []
    trajectories: list[Trajectory] | None = [] if task.retain_trajectories else None
    psds: list[PsdEstimate] | None = [] if task.retain_psds else None

    dt_sample = task.dt * task.stride
    for row, k in enumerate(lanes):
        if aborted_step[row] >= 0:
            bad = int(aborted_step[row])
            aborted.append(AbortRecord(realization=k, step_index=bad, t=bad * task.dt))
            continue
        x = samples[row]
        count += 1
        delta = x - mean
        mean += delta / count
        m2 += delta * (x - mean)
        lane_model = replace(
            task.model, drive=replace(task.model.drive, phi=phi_vec[row])
        )
        if task.retain_trajectories:
            trajectories.append(
                Trajectory(
                    model=lane_model,
                    scheme=task.scheme,
                    t0=0.0,
                    dt=task.dt,
                    stride=task.stride,
                    samples=x.copy(),
                    base_seed=task.base_seed,
                    xi_index=records[row].xi_index,
                    eta_index=records[row].eta_index,
                )
            )
        if task.psd_start_sample is not None:
            lo = task.psd_start_sample
            hi = lo + task.psd_n_samples
            window_current = current(
                x[lo:hi], times[lo:hi], task.model.drive, phi=phi_vec[row]
            )
            est = periodogram(window_current, dt_sample, drive_period=task.model.drive.period)
            if psd_sum is None:
                psd_sum = est.power.copy()
                freq = est.freq
            else:
                psd_sum += est.power
            psd_count += 1
            if task.retain_psds:
                psds.append(est)
    if count == 0:
        mean = None
        m2 = None
    return _ChunkResult(
        start=task.start,
        count=count,
        mean=mean,
        m2=m2,
        psd_sum=psd_sum,
        psd_count=psd_count,
        freq=freq,
        aborted=aborted,
        records=records,
        trajectories=trajectories,
        psds=psds,
    )


def _merge_stats(
    count_a: int, mean_a: np.ndarray, m2_a: np.ndarray, count_b: int, mean_b: np.ndarray, m2_b: np.ndarray
) -> tuple[int, np.ndarray, np.ndarray]:
    total = count_a + count_b
    delta = mean_b - mean_a
    mean = mean_a + delta * (count_b / total)
    m2 = m2_a + m2_b + delta * delta * (count_a * count_b / total)
    return total, mean, m2


def run_ensemble(
    model: ModelSpec,
    scheme: Scheme,
    n_realizations: int,
    base_seed: int,
    t_end: float,
    dt: float,
    stride: int = 1,
    workers: int = 1,
    randomize_phase: bool | None = None,
    initial: float | None = None,
    retain_trajectories: bool = False,
    psd_window: tuple[int, int] | None = None,
    retain_psds: bool = False,
) -> EnsembleResult:
    """Run n_realizations independent realizations and aggregate them.

    randomize_phase defaults to the family convention: one uniform drive
    phase per realization for the correlated families, the configured phase
    for everything else. psd_window=(start_period, n_periods) accumulates
    the averaged periodogram of the device current over that window of
    whole drive periods.
    """
    if not isinstance(n_realizations, int) or n_realizations < 1:
        raise ValueError(f"n_realizations must be a positive integer, got {n_realizations!r}")
    n_steps = _resolve_steps(t_end, dt, stride)
    spp = samples_per_period(model.drive.period, dt, stride)
    n_records = n_steps // stride + 1
    if randomize_phase is None:
        randomize_phase = isinstance(model, (CorrelatedLinearModel, MonostablePowerModel))
    if initial is None:
        initial = default_initial_state(model)

    psd_start_sample = None
    psd_n_samples = None
    if psd_window is not None:
        start_period, n_periods = psd_window
        if n_periods < 2:
            raise ValueError("periodogram window must cover at least 2 drive periods")
        psd_start_sample = start_period * spp
        psd_n_samples = n_periods * spp
        if psd_start_sample + psd_n_samples > n_records:
            raise ValueError(
                f"periodogram window [{start_period}, {start_period + n_periods}) periods "
                f"does not fit a run of {(n_records - 1) // spp} whole periods"
            )

    tasks = [
        _ChunkTask(
            model=model,
            scheme=scheme,
            n_steps=n_steps,
            dt=dt,
            stride=stride,
            base_seed=base_seed,
            start=start,
            stop=min(start + CHUNK_SIZE, n_realizations),
            randomize_phase=randomize_phase,
            initial=initial,
            psd_start_sample=psd_start_sample,
            psd_n_samples=psd_n_samples,
            retain_trajectories=retain_trajectories,
            retain_psds=retain_psds,
        )
        for start in range(0, n_realizations, CHUNK_SIZE)
    ]

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(
            max_workers=min(workers, len(tasks)), mp_context=get_context("spawn")
        ) as pool:
            results = list(pool.map(_chunk_worker, tasks))
    else:
        results = [_chunk_worker(task) for task in tasks]

    count = 0
    mean: np.ndarray | None = None
    m2: np.ndarray | None = None
    psd_sum: np.ndarray | None = None
    psd_count = 0
    freq: np.ndarray | None = None
    aborted: list[AbortRecord] = []
    records: list[RealizationRecord] = []
    trajectories: list[Trajectory] = []
    psds: list[PsdEstimate] = []
    for res in results:
        aborted.extend(res.aborted)
        records.extend(res.records)
        if res.trajectories is not None:
            trajectories.extend(res.trajectories)
        if res.psds is not None:
            psds.extend(res.psds)
        if res.count > 0:
            if mean is None:
                count, mean, m2 = res.count, res.mean, res.m2
            else:
                count, mean, m2 = _merge_stats(count, mean, m2, res.count, res.mean, res.m2)
        if res.psd_sum is not None:
            if psd_sum is None:
                psd_sum = res.psd_sum
                freq = res.freq
            else:
                psd_sum += res.psd_sum
            psd_count += res.psd_count

    if count == 0:
        raise EnsembleError(
            f"all {n_realizations} realizations aborted; first blow-up at t={aborted[0].t:.6g}"
        )

    variance = m2 / count
    if count > 1:
        stderr = np.sqrt(m2 / (count - 1) / count)
    else:
        stderr = np.full_like(mean, np.nan)

    psd = None
    if psd_sum is not None:
        psd = PsdEstimate(
            freq=freq,
            power=psd_sum / psd_count,
            n_samples=psd_n_samples,
            dt_sample=dt * stride,
            realization_count=psd_count,
            window="rectangular, mean removed, ensemble averaged",
        )

    return EnsembleResult(
        model=model,
        scheme=scheme,
        dt=dt,
        stride=stride,
        t_end=t_end,
        base_seed=base_seed,
        n_realizations=n_realizations,
        n_effective=count,
        times=np.arange(n_records) * (dt * stride),
        mean=mean,
        variance=variance,
        stderr=stderr,
        aborted=tuple(aborted),
        records=tuple(records),
        trajectories=tuple(trajectories) if retain_trajectories else None,
        psd=psd,
        psds=tuple(psds) if retain_psds else None,
        psd_window=psd_window,
    )
