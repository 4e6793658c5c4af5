"""Ensemble aggregation: determinism, abort handling, averaged spectra."""

import math

import numpy as np
import pytest

from stochmem import (
    CHUNK_SIZE,
    CorrelatedLinearModel,
    DoubleWellModel,
    DriveSignal,
    EnsembleError,
    MonostablePowerModel,
    Scheme,
    averaged_psd,
    integrate,
    run_ensemble,
    streams_for,
    uniform_angles,
)

DRIVE = DriveSignal(V1=4.0, omega=2.0 * math.pi)
LINEAR = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.2, q=0.3, c=0.5, drive=DRIVE)


class TestSingleRealization:
    def test_mean_is_the_trajectory_and_variance_is_zero(self):
        xi, eta, _ = streams_for(17, 0)
        traj = integrate(LINEAR, Scheme.HEUN_STRATONOVICH, 4.0, xi, eta, dt=1.0 / 256.0)
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 1, 17, t_end=4.0, dt=1.0 / 256.0,
            randomize_phase=False,
        )
        np.testing.assert_array_equal(res.mean, traj.samples)
        np.testing.assert_array_equal(res.variance, np.zeros_like(res.mean))
        assert np.all(np.isnan(res.stderr))
        assert res.n_effective == 1


class TestDeterministicAggregation:
    def test_worker_count_cannot_change_any_bit(self):
        # 300 realizations span three fixed chunks; reductions follow
        # chunk order whatever the pool looks like
        kw = dict(t_end=2.0, dt=1.0 / 256.0, psd_window=None)
        serial = run_ensemble(LINEAR, Scheme.HEUN_STRATONOVICH, 300, 5, workers=1, **kw)
        pooled = run_ensemble(LINEAR, Scheme.HEUN_STRATONOVICH, 300, 5, workers=3, **kw)
        np.testing.assert_array_equal(serial.mean, pooled.mean)
        np.testing.assert_array_equal(serial.variance, pooled.variance)
        np.testing.assert_array_equal(serial.stderr, pooled.stderr)
        assert serial.records == pooled.records

    def test_lanes_replay_as_single_integrations(self):
        # each retained trajectory must be bitwise reproducible from the
        # scalar path with the recorded streams and phase
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 5, 23, t_end=2.0, dt=1.0 / 256.0,
            retain_trajectories=True,
        )
        assert res.trajectories is not None and len(res.trajectories) == 5
        for record, traj in zip(res.records, res.trajectories):
            xi, eta, phase = streams_for(23, record.realization)
            assert record.phi == float(uniform_angles(phase, 1)[0])
            single = integrate(
                traj.model, Scheme.HEUN_STRATONOVICH, 2.0, xi, eta, dt=1.0 / 256.0
            )
            np.testing.assert_array_equal(traj.samples, single.samples)

    def test_welford_chan_matches_naive_statistics(self):
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 64, 3, t_end=2.0, dt=1.0 / 256.0,
            retain_trajectories=True,
        )
        stack = np.stack([t.samples for t in res.trajectories])
        np.testing.assert_allclose(res.mean, stack.mean(axis=0), rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(res.variance, stack.var(axis=0), rtol=1e-10, atol=1e-14)
        expected_se = stack.std(axis=0, ddof=1) / math.sqrt(64)
        np.testing.assert_allclose(res.stderr, expected_se, rtol=1e-10, atol=1e-14)


class TestPhaseConventions:
    def test_correlated_family_randomizes_by_default(self):
        res = run_ensemble(LINEAR, Scheme.HEUN_STRATONOVICH, 8, 2, t_end=1.0, dt=1.0 / 256.0)
        phis = {r.phi for r in res.records}
        assert len(phis) == 8

    def test_double_well_keeps_the_configured_phase_by_default(self):
        m = DoubleWellModel(sigma=0.3, drive=DriveSignal(V1=0.2, omega=2.0 * math.pi, phi=0.4))
        res = run_ensemble(m, Scheme.HEUN_STRATONOVICH, 4, 2, t_end=1.0, dt=1.0 / 256.0)
        assert {r.phi for r in res.records} == {0.4}

    def test_explicit_override_wins(self):
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 4, 2, t_end=1.0, dt=1.0 / 256.0,
            randomize_phase=False,
        )
        assert {r.phi for r in res.records} == {0.0}


class TestAborts:
    MODEL = MonostablePowerModel(
        a=1.0, V0=1.0, p=0.0, q=5.0, c=0.0, n=2,
        drive=DriveSignal(V1=1.5, omega=2.0 * math.pi),
    )

    def test_partial_aborts_are_excluded_and_reported(self):
        res = run_ensemble(
            self.MODEL, Scheme.EULER_MARUYAMA, 64, 0, t_end=0.25, dt=1.0 / 256.0,
            initial=-22.6, randomize_phase=False, retain_trajectories=True,
        )
        assert 0 < len(res.aborted) < 64
        assert res.n_effective == 64 - len(res.aborted)
        assert len(res.trajectories) == res.n_effective
        for rec in res.aborted:
            assert rec.step_index >= 1
            assert rec.t == pytest.approx(rec.step_index / 256.0, rel=1e-12)
        # aggregates are exactly the statistics of the survivors
        stack = np.stack([t.samples for t in res.trajectories])
        np.testing.assert_allclose(res.mean, stack.mean(axis=0), rtol=1e-12, atol=1e-12)
        assert np.all(np.isfinite(res.mean))

    def test_all_aborting_raises(self):
        with pytest.raises(EnsembleError):
            run_ensemble(
                self.MODEL, Scheme.EULER_MARUYAMA, 8, 0, t_end=0.25, dt=1.0 / 256.0,
                initial=-40.0, randomize_phase=False,
            )


class TestAveragedSpectrum:
    def test_ensemble_psd_is_the_average_of_lane_psds(self):
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 16, 11, t_end=6.0, dt=1.0 / 256.0,
            psd_window=(2, 4), retain_psds=True,
        )
        assert res.psd is not None
        assert res.psd.realization_count == 16
        assert len(res.psds) == 16
        manual = averaged_psd(list(res.psds))
        np.testing.assert_allclose(res.psd.power, manual.power, rtol=1e-12)
        np.testing.assert_array_equal(res.psd.freq, manual.freq)
        # window covers 4 periods at 256 samples each
        assert res.psd.n_samples == 1024
        assert res.psd.bin_width == pytest.approx(0.25, rel=1e-15)

    def test_psd_window_must_fit_the_run(self):
        with pytest.raises(ValueError):
            run_ensemble(
                LINEAR, Scheme.HEUN_STRATONOVICH, 2, 0, t_end=4.0, dt=1.0 / 256.0,
                psd_window=(2, 4),
            )
        with pytest.raises(ValueError):
            run_ensemble(
                LINEAR, Scheme.HEUN_STRATONOVICH, 2, 0, t_end=4.0, dt=1.0 / 256.0,
                psd_window=(0, 1),
            )


class TestResultHelpers:
    def test_post_transient_mask(self):
        res = run_ensemble(
            LINEAR, Scheme.HEUN_STRATONOVICH, 2, 0, t_end=3.0, dt=1.0 / 256.0,
        )
        mask = res.post_transient(2)
        assert mask.size == res.times.size == 3 * 256 + 1
        assert int(np.count_nonzero(mask)) == 257
        assert res.times[mask][0] == pytest.approx(2.0, rel=1e-15)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            run_ensemble(LINEAR, Scheme.HEUN_STRATONOVICH, 0, 0, t_end=1.0, dt=1.0 / 256.0)

    def test_chunk_size_is_pinned(self):
        # the reduction layout is part of the reproducibility contract
        assert CHUNK_SIZE == 128
