"""Model definitions: drift, diffusion, potential, drive."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochmem import (
    CorrelatedLinearModel,
    DoubleWellModel,
    DriveSignal,
    MonostablePowerModel,
    ShiftedCorrelatedLinearModel,
    TimeDelayModel,
    autonomous_drift,
    current,
    default_initial_state,
    diffusion,
    drift,
    drive_voltage,
    potential_slope,
    potential_value,
    resonance_holds,
    stationary_points,
    stratonovich_correction,
    w_polynomial,
    well_depths,
)

DRIVE = DriveSignal(V1=0.2, omega=2.0 * math.pi)


class TestDriveSignal:
    def test_voltage_and_period(self):
        d = DriveSignal(V1=2.0, omega=math.pi, phi=0.5)
        assert d.period == pytest.approx(2.0, rel=1e-15)
        assert drive_voltage(d, 0.0) == pytest.approx(2.0 * math.cos(0.5), rel=1e-15)
        assert drive_voltage(d, 1.0) == pytest.approx(2.0 * math.cos(math.pi + 0.5), rel=1e-15)

    def test_phase_override_broadcasts(self):
        d = DriveSignal(V1=1.0, omega=2.0 * math.pi)
        phis = np.array([0.0, math.pi / 2.0, math.pi])
        v = drive_voltage(d, 0.0, phi=phis)
        np.testing.assert_allclose(v, np.cos(phis), atol=1e-15)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            DriveSignal(V1=-0.1, omega=1.0)
        with pytest.raises(ValueError):
            DriveSignal(V1=1.0, omega=0.0)
        with pytest.raises(ValueError):
            DriveSignal(V1=1.0, omega=1.0, phi=7.0)


class TestDrift:
    def test_timedelay_is_linear_relaxation(self):
        m = TimeDelayModel(a=2.0, V0=1.5, drive=DRIVE)
        assert drift(m, 3.0, 0.0) == pytest.approx(-6.0 + 1.5 + 0.2, rel=1e-15)

    def test_timedelay_drive_vanishes_at_quarter_period(self):
        m = TimeDelayModel(a=1.0, V0=0.0, drive=DriveSignal(V1=0.2, omega=2.0 * math.pi))
        # cos(pi/2) under a transcendental argument: zero only to rounding
        assert abs(drift(m, 0.0, 0.25)) < 1e-16

    def test_double_well_frozen_value(self):
        m = DoubleWellModel(sigma=0.3, drive=DRIVE)
        # at the well center the quartic term vanishes: -(0 - 0 - 1/8) + V1
        assert drift(m, 2.0, 0.0) == pytest.approx(0.325, rel=1e-15)

    def test_double_well_slope_matches_symbolic_derivative(self):
        import sympy

        g = sympy.Symbol("g")
        potential = (g - 2) ** 4 / 4 - (g - 2) ** 2 / 2 - (g - 2) / 8
        force = sympy.lambdify(g, -sympy.diff(potential, g), "numpy")
        m = DoubleWellModel(sigma=0.1, drive=DRIVE)
        grid = np.linspace(-1.0, 5.0, 61)
        np.testing.assert_allclose(autonomous_drift(m, grid), force(grid), rtol=1e-12, atol=1e-12)

    def test_potential_slope_is_negative_drift(self):
        m = DoubleWellModel(sigma=0.1, drive=DRIVE)
        grid = np.linspace(0.0, 4.0, 41)
        np.testing.assert_array_equal(autonomous_drift(m, grid), -potential_slope(grid))

    def test_correlated_linear(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi, phi=0.3)
        m = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.2, q=0.3, c=0.5, drive=d)
        assert drift(m, 2.0, 0.1) == pytest.approx(
            -2.0 + 1.0 + 4.0 * math.cos(2.0 * math.pi * 0.1 + 0.3), rel=1e-14
        )

    def test_monostable_power(self):
        m = MonostablePowerModel(a=0.5, V0=1.0, p=0.1, q=0.1, c=0.0, n=2, drive=DRIVE)
        assert m.power == 3
        assert autonomous_drift(m, 2.0) == pytest.approx(-0.5 * 8.0 + 1.0, rel=1e-15)

    def test_monostable_rejects_linear_exponent(self):
        with pytest.raises(ValueError):
            MonostablePowerModel(a=1.0, V0=1.0, p=0.1, q=0.1, c=0.0, n=1, drive=DRIVE)
        with pytest.raises(ValueError):
            MonostablePowerModel(a=1.0, V0=1.0, p=0.1, q=0.1, c=0.0, n=7, drive=DRIVE)


class TestDiffusion:
    def test_correlated_linear_components(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        m = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.2, q=0.3, c=0.6, drive=d)
        g_xi, g_eta = diffusion(m, 1.5)
        assert g_xi == pytest.approx(-0.2 * 1.5 + 0.3 * 0.6, rel=1e-15)
        assert g_eta == pytest.approx(0.3 * math.sqrt(1.0 - 0.36), rel=1e-15)

    def test_shifted_variant_centers_on_mean_level(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        m = ShiftedCorrelatedLinearModel(a=1.0, V0=1.0, p=0.15, q=0.15, c=1.0, drive=d)
        g_xi, _ = diffusion(m, 1.0)
        assert g_xi == 0.0
        g_xi2, _ = diffusion(m, 3.0)
        assert g_xi2 == pytest.approx(-0.15 * 2.0, rel=1e-15)

    def test_shifted_requires_resonance(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        with pytest.raises(ValueError):
            ShiftedCorrelatedLinearModel(a=1.0, V0=1.0, p=0.15, q=0.2, c=1.0, drive=d)

    def test_shifted_equals_plain_at_resonance(self):
        # q c = V0 p / a makes -p(G - V0/a) identical to -pG + qc
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        plain = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.25, q=0.25, c=1.0, drive=d)
        shifted = ShiftedCorrelatedLinearModel(a=1.0, V0=1.0, p=0.25, q=0.25, c=1.0, drive=d)
        grid = np.linspace(-2.0, 4.0, 31)
        for g in grid:
            a1, b1 = diffusion(plain, float(g))
            a2, b2 = diffusion(shifted, float(g))
            assert abs(a1 - a2) <= 1e-12
            assert b1 == b2

    def test_additive_families(self):
        dw = DoubleWellModel(sigma=0.4, drive=DRIVE)
        assert diffusion(dw, 1.7) == (0.4, 0.0)
        td = TimeDelayModel(a=1.0, V0=1.0, drive=DRIVE)
        assert diffusion(td, 1.7) == (0.0, 0.0)

    def test_stratonovich_correction(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        m = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.2, q=0.3, c=0.6, drive=d)
        # g dg/dG with g = -pG + qc and dg/dG = -p
        g = 1.5
        want = 0.5 * (-0.2 * g + 0.18) * (-0.2)
        assert stratonovich_correction(m, g) == pytest.approx(want, rel=1e-14)
        dw = DoubleWellModel(sigma=0.4, drive=DRIVE)
        assert stratonovich_correction(dw, g) == 0.0


class TestCurrent:
    def test_product_form(self):
        d = DriveSignal(V1=2.0, omega=math.pi)
        assert current(1.5, 0.0, d) == pytest.approx(3.0, rel=1e-15)

    def test_pinch_is_exact_where_voltage_is_zero(self):
        # I = G V as a literal product: V == 0 forces I == 0 bitwise
        d = DriveSignal(V1=3.0, omega=2.0 * math.pi)
        t = np.linspace(0.0, 2.0, 1001)
        v = drive_voltage(d, t)
        g = np.random.default_rng(7).normal(2.0, 1.0, t.size)
        i = current(g, t, d)
        zero_v = v == 0.0
        assert np.array_equal(i[zero_v], np.zeros(np.count_nonzero(zero_v)))

    def test_zero_amplitude_gives_identically_zero_current(self):
        d = DriveSignal(V1=0.0, omega=2.0 * math.pi)
        t = np.linspace(0.0, 5.0, 100)
        i = current(np.full(t.size, 1.3), t, d)
        assert np.array_equal(i, np.zeros(t.size))


class TestPotential:
    def test_stationary_points_frozen(self):
        # frozen from the 30-digit polynomial roots of (g-2)^3 - (g-2) - 1/8
        left, barrier, right = stationary_points()
        assert left == pytest.approx(1.0695970734441482, abs=1e-12)
        assert barrier == pytest.approx(1.8729491558174738, abs=1e-12)
        assert right == pytest.approx(3.0574537707383778, abs=1e-12)

    def test_stationary_points_are_roots_of_slope(self):
        for g in stationary_points():
            assert abs(potential_slope(g)) < 1e-12

    def test_stationary_points_against_sign_scan(self):
        # independent bracket scan of the slope on a fine grid
        grid = np.linspace(0.0, 4.0, 400001)
        slope = potential_slope(grid)
        flips = np.nonzero(np.sign(slope[:-1]) != np.sign(slope[1:]))[0]
        assert flips.size == 3
        for bracket, root in zip(flips, stationary_points()):
            assert grid[bracket] <= root <= grid[bracket + 1]

    def test_right_well_is_deeper(self):
        depth_left, depth_right = well_depths()
        assert depth_right > depth_left > 0.0
        left, barrier, right = stationary_points()
        assert potential_value(right) < potential_value(left) < potential_value(barrier)

    def test_default_initial_state(self):
        dw = DoubleWellModel(sigma=0.3, drive=DRIVE)
        assert default_initial_state(dw) == stationary_points()[0]
        td = TimeDelayModel(a=1.0, V0=1.0, drive=DRIVE)
        assert default_initial_state(td) == 0.0


class TestWPolynomial:
    def test_cubic_frozen_values(self):
        # n = 2, V0 = a = 1: W(y) = y^2 + 3y + 3, so W(0) = 3, W(1) = 7
        assert w_polynomial(2, 1.0, 1.0, 0.0) == pytest.approx(3.0, rel=1e-15)
        assert w_polynomial(2, 1.0, 1.0, 1.0) == pytest.approx(7.0, rel=1e-15)

    def test_quintic_frozen_value(self):
        assert w_polynomial(3, 1.0, 1.0, 0.0) == pytest.approx(5.0, rel=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(min_value=2, max_value=6),
        v0=st.floats(min_value=0.2, max_value=4.0),
        a=st.floats(min_value=0.2, max_value=4.0),
        y=st.floats(min_value=-0.4, max_value=2.5),
    )
    def test_shift_identity(self, n, v0, a, y):
        # y W(y) must reproduce (y + r)^(2n-1) - r^(2n-1) with r the fixed point
        r = (v0 / a) ** (1.0 / (2 * n - 1))
        lhs = y * w_polynomial(n, v0, a, y)
        rhs = (y + r) ** (2 * n - 1) - r ** (2 * n - 1)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


class TestResonanceCheck:
    def test_holds_and_fails(self):
        d = DriveSignal(V1=4.0, omega=2.0 * math.pi)
        on = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.15, q=0.15, c=1.0, drive=d)
        off = CorrelatedLinearModel(a=1.0, V0=1.0, p=0.15, q=0.2, c=1.0, drive=d)
        assert resonance_holds(on)
        assert not resonance_holds(off)
