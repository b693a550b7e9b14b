import math

import numpy as np
import pytest

from nvspin import (
    DegenerateSteadyStateError,
    LevelPopulations,
    MicrowaveDrive,
    RateParams,
    TransitionContext,
    TransitionPair,
    UndefinedPolarizationError,
    evolve,
    pl_rate,
    polarization,
    rate_matrix,
    steady_state,
)
from nvspin.rates import drive_rate_per_ns


def _bulk_context():
    return TransitionContext(
        ground=TransitionPair(2870.0, 2870.0), excited=TransitionPair(1423.0, 1423.0)
    )


class TestRateParams:
    def test_defaults_reproduce_lifetimes(self, default_rates):
        assert default_rates.gamma_rad == pytest.approx(1.0 / 23.0)
        assert default_rates.gamma_rad + default_rates.k_isc_1 == pytest.approx(1.0 / 12.7)
        assert default_rates.k_isc_0 == 0.0

    def test_invariants(self):
        with pytest.raises(ValueError):
            RateParams(gamma_rad=-1.0)
        with pytest.raises(ValueError):
            RateParams(branch_0=1.5)
        with pytest.raises(ValueError):
            RateParams(k_isc_0=0.1, k_isc_1=0.01)


class TestRateMatrix:
    def test_columns_sum_to_zero_and_offdiag_nonneg(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            rp = RateParams(
                pump_rate=rng.uniform(0.0, 0.1),
                gamma_rad=rng.uniform(0.01, 0.1),
                k_isc_0=0.0,
                k_isc_1=rng.uniform(0.0, 0.1),
                gamma_s=rng.uniform(0.001, 0.1),
                branch_0=rng.uniform(0.0, 1.0),
            )
            g = rate_matrix(rp, laser_on=bool(rng.integers(2)))
            assert np.max(np.abs(g.sum(axis=0))) < 1e-15
            off = g - np.diag(np.diag(g))
            assert off.min() >= 0.0

    def test_e0_exit_rate(self, default_rates):
        g = rate_matrix(default_rates, laser_on=False)
        assert -g[3, 3] == pytest.approx(
            default_rates.gamma_rad + default_rates.k_isc_0
        )

    def test_em1_total_decay_matches_short_lifetime(self, default_rates):
        g = rate_matrix(default_rates, laser_on=False)
        assert -g[5, 5] == pytest.approx(1.0 / 12.7, abs=1e-12)

    def test_detuned_drive_suppressed(self):
        drive_on = MicrowaveDrive(frequency=2870.0, rabi_frequency=5.0, linewidth_fwhm=10.0)
        w_res = drive_rate_per_ns(drive_on, 2870.0)
        drive_off = MicrowaveDrive(
            frequency=2870.0 + 16.5 * 10.0, rabi_frequency=5.0, linewidth_fwhm=10.0
        )
        w_detuned = drive_rate_per_ns(drive_off, 2870.0)
        assert w_detuned < 1e-3 * w_res

    def test_drive_requires_context(self, default_rates):
        drive = MicrowaveDrive(frequency=2870.0, rabi_frequency=1.0, linewidth_fwhm=10.0)
        with pytest.raises(ValueError):
            rate_matrix(default_rates, laser_on=True, cw_drive=drive)

    def test_drive_symmetric_two_way(self, default_rates):
        drive = MicrowaveDrive(frequency=2870.0, rabi_frequency=2.0, linewidth_fwhm=10.0)
        g = rate_matrix(
            default_rates, laser_on=True, cw_drive=drive, esr_context=_bulk_context()
        )
        assert g[0, 2] == pytest.approx(g[2, 0])
        assert g[0, 2] > 0


class TestEvolve:
    def test_zero_duration(self, default_rates):
        p0 = LevelPopulations.ground_thermal()
        out = evolve(p0, rate_matrix(default_rates, laser_on=True), 0.0)
        assert np.array_equal(out.p, p0.p)

    def test_pure_e0_free_decay_analytic(self, default_rates):
        gen = rate_matrix(default_rates, laser_on=False)
        p0 = LevelPopulations.pure(3)
        for t in (1.0, 10.0, 40.0):
            out = evolve(p0, gen, t)
            assert out[3] == pytest.approx(math.exp(-t / 23.0), abs=1e-6)

    def test_conservation_long_evolution(self, default_rates):
        gen = rate_matrix(default_rates, laser_on=True)
        out = evolve(LevelPopulations.ground_thermal(), gen, 10_000.0)
        assert abs(out.p.sum() - 1.0) < 1e-9
        assert out.p.min() >= 0.0

    def test_nonfinite_generator_rejected(self, default_rates):
        gen = rate_matrix(default_rates, laser_on=True)
        gen[0, 0] = float("nan")
        with pytest.raises(ValueError):
            evolve(LevelPopulations.ground_thermal(), gen, 1.0)


class TestSteadyState:
    def test_plus_minus_one_drains(self, default_rates):
        ss = steady_state(rate_matrix(default_rates, laser_on=True))
        assert ss[1] < 1e-6 and ss[2] < 1e-6
        assert ss[4] < 1e-6 and ss[5] < 1e-6

    def test_resonant_drive_reduces_pl(self, default_rates):
        base = pl_rate(steady_state(rate_matrix(default_rates, laser_on=True)), default_rates)
        drive = MicrowaveDrive(frequency=2870.0, rabi_frequency=5.0, linewidth_fwhm=10.0)
        driven_gen = rate_matrix(
            default_rates, laser_on=True, cw_drive=drive, esr_context=_bulk_context()
        )
        driven = pl_rate(steady_state(driven_gen), default_rates)
        assert driven < base

    def test_laser_off_degenerate(self, default_rates):
        with pytest.raises(DegenerateSteadyStateError):
            steady_state(rate_matrix(default_rates, laser_on=False))

    def test_matches_long_time_evolution(self, default_rates):
        gen = rate_matrix(default_rates, laser_on=True)
        ss = steady_state(gen)
        evolved = evolve(LevelPopulations.ground_thermal(), gen, 100_000.0)
        assert np.max(np.abs(ss.p - evolved.p)) < 1e-8


class TestPlRate:
    def test_pure_e0(self, default_rates):
        assert pl_rate(LevelPopulations.pure(3), default_rates) == pytest.approx(1.0 / 23.0)

    def test_ground_dark(self, default_rates):
        assert pl_rate(LevelPopulations.ground_thermal(), default_rates) == 0.0

    def test_mixture_linearity(self, default_rates):
        a = LevelPopulations.pure(3)
        b = LevelPopulations.ground_thermal()
        mix = LevelPopulations((a.p + b.p) / 2.0)
        assert pl_rate(mix, default_rates) == pytest.approx(
            (pl_rate(a, default_rates) + pl_rate(b, default_rates)) / 2.0
        )


class TestPolarization:
    def test_thermal(self):
        assert polarization(LevelPopulations.ground_thermal()) == pytest.approx(-1.0 / 3.0)

    def test_pure_g0(self):
        assert polarization(LevelPopulations.pure(0)) == 1.0

    def test_post_pump_steady_state(self, default_rates):
        ss = steady_state(rate_matrix(default_rates, laser_on=True))
        assert polarization(ss) > 0.99

    def test_empty_ground_rejected(self):
        with pytest.raises(UndefinedPolarizationError):
            polarization(LevelPopulations.pure(3))


class TestLevelPopulations:
    def test_clipping_and_validation(self):
        p = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1e-13])
        pops = LevelPopulations(p)
        assert pops[6] == 0.0
        with pytest.raises(ValueError):
            LevelPopulations(np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1e-6]))
        with pytest.raises(ValueError):
            LevelPopulations(np.full(7, 0.2))
