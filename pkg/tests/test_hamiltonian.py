import numpy as np
import pytest

from nvspin import (
    SpinParams,
    build_hamiltonian,
    diagonalize,
    esr_frequencies,
    high_field_approx,
    lac_field,
)
from nvspin.constants import BOHR_MAGNETON_MHZ_PER_G as MU
from nvspin.hamiltonian import MS0_BASIS_INDEX, SX, SY, SZ

from oracles import eigvals3_hermitian_closed_form, random_hermitian3


class TestSpinOperators:
    def test_hermitian(self):
        for op in (SX, SY, SZ):
            assert np.allclose(op, op.conj().T, atol=1e-15)

    def test_commutators_cyclic(self):
        assert np.allclose(SX @ SY - SY @ SX, 1j * SZ, atol=1e-14)
        assert np.allclose(SY @ SZ - SZ @ SY, 1j * SX, atol=1e-14)
        assert np.allclose(SZ @ SX - SX @ SZ, 1j * SY, atol=1e-14)

    def test_casimir(self):
        total = SX @ SX + SY @ SY + SZ @ SZ
        assert np.allclose(total, 2.0 * np.eye(3), atol=1e-14)

    def test_sz_diagonal_in_basis_order(self):
        assert np.allclose(np.diag(SZ).real, [1.0, 0.0, -1.0])


class TestSpinParams:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SpinParams(d_zfs=0.0)
        with pytest.raises(ValueError):
            SpinParams(d_zfs=2870.0, e_strain=-1.0)
        with pytest.raises(ValueError):
            SpinParams(d_zfs=2870.0, g_factor=0.0)
        with pytest.raises(ValueError):
            SpinParams(d_zfs=100.0, e_strain=100.0)
        with pytest.raises(ValueError):
            SpinParams(d_zfs=float("nan"))


class TestBuildHamiltonian:
    def test_zero_field_axial_spectrum(self, gs_bulk):
        h = build_hamiltonian(gs_bulk, (0.0, 0.0, 0.0))
        assert np.allclose(h, np.diag(np.diag(h)))
        evals = np.sort(np.diag(h).real)
        d = gs_bulk.d_zfs
        assert np.allclose(evals, [-2 * d / 3, d / 3, d / 3], atol=1e-9)

    def test_axial_43g_zeeman_shift(self, gs_bulk):
        # g*mu*B evaluated by hand from the constants
        zeeman = 2.0028 * MU * 43.0
        eig = diagonalize(build_hamiltonian(gs_bulk, (0.0, 0.0, 43.0)))
        d = gs_bulk.d_zfs
        expected = np.sort([-2 * d / 3, d / 3 - zeeman, d / 3 + zeeman])
        assert np.allclose(eig.energies, expected, atol=1e-9)

    def test_excited_state_zero_field(self, es_bulk):
        h = build_hamiltonian(es_bulk, (0.0, 0.0, 0.0))
        assert abs(np.trace(h)) < 1e-9
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        pair = esr_frequencies(es_bulk, (0.0, 0.0, 0.0))
        assert pair.omega_minus == pytest.approx(1423.0, abs=1e-9)
        assert pair.omega_plus == pytest.approx(1423.0, abs=1e-9)

    def test_nonfinite_field_rejected(self, gs_bulk):
        with pytest.raises(ValueError):
            build_hamiltonian(gs_bulk, (0.0, float("nan"), 0.0))
        with pytest.raises(ValueError):
            build_hamiltonian(gs_bulk, (float("inf"), 0.0, 0.0))

    def test_hermitian_and_traceless_random_draws(self):
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            params = SpinParams(
                d_zfs=rng.uniform(100.0, 4000.0),
                e_strain=rng.uniform(0.0, 90.0),
                g_factor=rng.uniform(1.5, 2.5),
            )
            b = rng.uniform(-500.0, 500.0, size=3)
            h = build_hamiltonian(params, b)
            scale = np.linalg.norm(h)
            assert np.max(np.abs(h - h.conj().T)) <= 1e-12 * scale
            assert abs(np.trace(h)) <= 1e-9


class TestDiagonalize:
    def test_identity_scaled(self):
        eig = diagonalize(4.2 * np.eye(3, dtype=complex))
        assert np.allclose(eig.energies, 4.2, atol=1e-12)
        overlap = eig.states.conj().T @ eig.states
        assert np.allclose(overlap, np.eye(3), atol=1e-10)

    def test_zero_field_strain_split(self):
        params = SpinParams(d_zfs=2870.0, e_strain=70.0)
        pair = esr_frequencies(params, (0.0, 0.0, 0.0))
        assert pair.omega_minus == pytest.approx(2800.0, abs=1e-9)
        assert pair.omega_plus == pytest.approx(2940.0, abs=1e-9)

    def test_matches_characteristic_cubic_oracle(self):
        rng = np.random.default_rng(23)
        worst = 0.0
        for _ in range(10_000):
            h = random_hermitian3(rng, scale=rng.uniform(0.1, 3000.0))
            eig = diagonalize(h)
            ref = eigvals3_hermitian_closed_form(h)
            scale = max(1.0, np.max(np.abs(ref)))
            worst = max(worst, np.max(np.abs(eig.energies - ref)) / scale)
        assert worst < 1e-8

    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            params = SpinParams(
                d_zfs=rng.uniform(1000.0, 3000.0),
                e_strain=rng.uniform(0.0, 500.0),
                g_factor=2.0,
            )
            h = build_hamiltonian(params, rng.uniform(-300, 300, size=3))
            eig = diagonalize(h)
            overlap = eig.states.conj().T @ eig.states
            assert np.max(np.abs(overlap - np.eye(3))) < 1e-10
            rebuilt = (eig.states * eig.energies) @ eig.states.conj().T
            assert np.max(np.abs(rebuilt - h)) < 1e-9
            assert np.all(np.diff(eig.energies) >= 0)

    def test_ms0_tracking(self, gs_bulk):
        eig = diagonalize(build_hamiltonian(gs_bulk, (5.0, -3.0, 120.0)))
        overlaps = np.abs(eig.states[MS0_BASIS_INDEX, :]) ** 2
        assert overlaps[eig.ms0_index] == pytest.approx(overlaps.max())

    def test_non_hermitian_rejected(self):
        bad = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError):
            diagonalize(bad)


class TestEsrFrequencies:
    def test_axial_43g(self, es_bulk):
        zeeman = 2.01 * MU * 43.0
        pair = esr_frequencies(es_bulk, (0.0, 0.0, 43.0))
        assert pair.omega_minus == pytest.approx(1423.0 - zeeman, abs=1e-9)
        assert pair.omega_plus == pytest.approx(1423.0 + zeeman, abs=1e-9)
        # the spec-level rounded anchors
        assert pair.omega_minus == pytest.approx(1302.0, abs=0.05)
        assert pair.omega_plus == pytest.approx(1544.0, abs=0.05)

    def test_zero_field_degenerate(self, gs_bulk):
        pair = esr_frequencies(gs_bulk, (0.0, 0.0, 0.0))
        assert pair.omega_minus == pair.omega_plus == pytest.approx(2870.0, abs=1e-9)

    def test_matches_closed_form_on_axis(self, es_bulk):
        for b in (10.0, 50.0, 200.0, 400.0):
            pair = esr_frequencies(es_bulk, (0.0, 0.0, b))
            approx = high_field_approx(es_bulk, b)
            assert pair.omega_minus == pytest.approx(approx.omega_minus, abs=1e-6)
            assert pair.omega_plus == pytest.approx(approx.omega_plus, abs=1e-6)

    def test_transverse_direction_invariance(self, es_bulk):
        # axial symmetry when E=0: frequencies depend only on |b_perp|
        rng = np.random.default_rng(3)
        for _ in range(50):
            bperp = rng.uniform(0.0, 300.0)
            bz = rng.uniform(-300.0, 300.0)
            fx = esr_frequencies(es_bulk, (bperp, 0.0, bz))
            fy = esr_frequencies(es_bulk, (0.0, bperp, bz))
            assert fx.omega_minus == pytest.approx(fy.omega_minus, abs=1e-8)
            assert fx.omega_plus == pytest.approx(fy.omega_plus, abs=1e-8)

    def test_zero_field_equals_d_plus_minus_e(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            d = rng.uniform(500.0, 3000.0)
            e = rng.uniform(0.0, 0.9) * d
            pair = esr_frequencies(SpinParams(d_zfs=d, e_strain=e), (0.0, 0.0, 0.0))
            assert pair.omega_minus == pytest.approx(d - e, abs=1e-9)
            assert pair.omega_plus == pytest.approx(d + e, abs=1e-9)


class TestHighFieldApprox:
    def test_92_gauss(self, es_bulk):
        zeeman = 2.01 * MU * 92.0
        pair = high_field_approx(es_bulk, 92.0)
        assert pair.omega_minus == pytest.approx(1423.0 - zeeman, abs=1e-12)
        assert pair.omega_plus == pytest.approx(1423.0 + zeeman, abs=1e-12)
        assert pair.omega_minus == pytest.approx(1164.2, abs=0.05)
        assert pair.omega_plus == pytest.approx(1681.8, abs=0.05)

    def test_zero_field(self, gs_bulk):
        pair = high_field_approx(gs_bulk, 0.0)
        assert pair == (2870.0, 2870.0)


class TestLacField:
    def test_excited_state(self, es_bulk):
        b = lac_field(es_bulk)
        assert b == pytest.approx(1423.0 / (2.01 * MU), abs=1e-9)
        assert b == pytest.approx(505.8, abs=0.05)

    def test_ground_state(self, gs_bulk):
        b = lac_field(gs_bulk)
        assert b == pytest.approx(2870.0 / (2.0028 * MU), abs=1e-9)
        assert b == pytest.approx(1023.8, abs=0.05)
        # the observed ensemble dip sits at 1028 G; agreement within 0.5%
        assert abs(b - 1028.0) / 1028.0 < 0.005
