import numpy as np
import pytest

from nvspin import (
    NV_AXES,
    FieldVector,
    NVOrientation,
    RotationScan,
    SpinParams,
    all_orientations,
    lab_to_nv,
    rotate_about_axis,
    rotation_scan_all_orientations,
    rotation_scan_frequencies,
)
from nvspin.constants import BOHR_MAGNETON_MHZ_PER_G as MU


class TestRotateAboutAxis:
    def test_quarter_turn(self):
        out = rotate_about_axis([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 90.0)
        assert np.allclose(out, [0.0, 1.0, 0.0], atol=1e-12)

    def test_full_turn_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            v = rng.normal(size=3)
            axis = rng.normal(size=3)
            out = rotate_about_axis(v, axis, 360.0)
            assert np.allclose(out, v, atol=1e-12)

    def test_111_in_rotation_plane(self):
        v111 = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        out = rotate_about_axis(v111, [1.0, -1.0, 0.0], 0.0)
        assert np.allclose(out, v111, atol=1e-12)
        # any nonzero angle moves it away
        moved = rotate_about_axis(v111, [1.0, -1.0, 0.0], 30.0)
        assert np.linalg.norm(moved - v111) > 1e-3

    def test_norm_preserved_and_composition(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            v = rng.normal(size=3)
            axis = rng.normal(size=3)
            t1, t2 = rng.uniform(0.0, 180.0, size=2)
            seq = rotate_about_axis(rotate_about_axis(v, axis, t1), axis, t2)
            direct = rotate_about_axis(v, axis, t1 + t2)
            assert np.allclose(seq, direct, atol=1e-10)
            assert np.linalg.norm(seq) == pytest.approx(np.linalg.norm(v), abs=1e-12)

    def test_zero_axis_rejected(self):
        with pytest.raises(ValueError):
            rotate_about_axis([1.0, 0.0, 0.0], [0.0, 0.0, 0.0], 10.0)


class TestOrientations:
    def test_four_unit_axes(self):
        assert len(NV_AXES) == 4
        for axis in NV_AXES:
            assert np.linalg.norm(axis) == pytest.approx(1.0, abs=1e-12)

    def test_x_axis_perpendicular(self):
        for o in all_orientations():
            assert abs(np.dot(o.axis, o.x_axis)) < 1e-12
            assert np.linalg.norm(o.x_axis) == pytest.approx(1.0, abs=1e-12)
            assert abs(np.dot(o.axis, o.y_axis)) < 1e-12

    def test_111_x_axis_convention(self):
        o = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))
        assert np.allclose(o.x_axis, np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0), atol=1e-12)


class TestLabToNv:
    def test_axial_field(self):
        o = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))
        b_nv = lab_to_nv(43.0 * o.axis, o)
        assert np.allclose(b_nv, [0.0, 0.0, 43.0], atol=1e-12)

    def test_transverse_norm_preserved(self):
        o = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))
        b = 92.0 * o.x_axis
        b_nv = lab_to_nv(b, o)
        assert b_nv[2] == pytest.approx(0.0, abs=1e-12)
        assert np.hypot(b_nv[0], b_nv[1]) == pytest.approx(92.0, abs=1e-9)

    def test_100_field_projection(self):
        o = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))
        b_nv = lab_to_nv([92.0, 0.0, 0.0], o)
        assert b_nv[2] == pytest.approx(92.0 / np.sqrt(3.0), abs=1e-9)
        assert np.linalg.norm(b_nv) == pytest.approx(92.0, abs=1e-9)

    def test_field_vector_type(self):
        o = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))
        fv = FieldVector(bx=0.0, by=0.0, bz=10.0)
        assert np.allclose(lab_to_nv(fv, o), lab_to_nv([0.0, 0.0, 10.0], o))
        with pytest.raises(ValueError):
            FieldVector(bx=float("nan"), by=0.0, bz=0.0)


class TestRotationScan:
    def setup_method(self):
        self.params = SpinParams(d_zfs=1423.0, e_strain=0.0, g_factor=2.01)
        self.orientation = NVOrientation(axis=np.array([1.0, 1.0, 1.0]))

    def test_aligned_angle_splitting(self):
        scan = RotationScan(
            rotation_axis=np.array([1.0, -1.0, 0.0]),
            b_magnitude=92.0,
            angle_grid=np.linspace(-90.0, 90.0, 181),
        )
        rows = rotation_scan_frequencies(
            scan, [1.0, 1.0, 1.0], self.params, self.orientation
        )
        splittings = np.array([r[2] - r[1] for r in rows])
        angles = np.array([r[0] for r in rows])
        assert angles[np.argmax(splittings)] == pytest.approx(0.0, abs=1.0)
        assert splittings.max() == pytest.approx(2.0 * 2.01 * MU * 92.0, abs=1e-6)

    def test_symmetry_about_aligned_angle(self):
        grid = np.linspace(-60.0, 60.0, 41)
        scan = RotationScan(
            rotation_axis=np.array([1.0, -1.0, 0.0]), b_magnitude=92.0, angle_grid=grid
        )
        rows = rotation_scan_frequencies(
            scan, [1.0, 1.0, 1.0], self.params, self.orientation
        )
        by_angle = {round(r[0], 9): (r[1], r[2]) for r in rows}
        for theta in grid:
            lo1, hi1 = by_angle[round(theta, 9)]
            lo2, hi2 = by_angle[round(-theta, 9)]
            assert lo1 == pytest.approx(lo2, abs=1e-6)
            assert hi1 == pytest.approx(hi2, abs=1e-6)

    def test_period_360(self):
        for theta in (10.0, 77.0, 133.0):
            scan = RotationScan(
                rotation_axis=np.array([1.0, -1.0, 0.0]),
                b_magnitude=92.0,
                angle_grid=np.array([theta]),
            )
            scan_b = RotationScan(
                rotation_axis=np.array([1.0, -1.0, 0.0]),
                b_magnitude=92.0,
                angle_grid=np.array([theta - 360.0]),
            )
            r1 = rotation_scan_frequencies(scan, [1, 1, 1], self.params, self.orientation)
            r2 = rotation_scan_frequencies(scan_b, [1, 1, 1], self.params, self.orientation)
            assert r1[0][1] == pytest.approx(r2[0][1], abs=1e-9)
            assert r1[0][2] == pytest.approx(r2[0][2], abs=1e-9)

    def test_zero_field_constant(self):
        params = SpinParams(d_zfs=1423.0, e_strain=40.0, g_factor=2.01)
        scan = RotationScan(
            rotation_axis=np.array([-1.0, -1.0, 2.0]),
            b_magnitude=0.0,
            angle_grid=np.linspace(0.0, 360.0, 19),
        )
        rows = rotation_scan_frequencies(scan, [1, 1, 1], params, self.orientation)
        for _, lo, hi in rows:
            assert lo == pytest.approx(1423.0 - 40.0, abs=1e-9)
            assert hi == pytest.approx(1423.0 + 40.0, abs=1e-9)

    def test_all_orientations_available(self):
        scan = RotationScan(
            rotation_axis=np.array([1.0, -1.0, 0.0]),
            b_magnitude=92.0,
            angle_grid=np.linspace(0.0, 180.0, 7),
        )
        result = rotation_scan_all_orientations(scan, [1, 1, 1], self.params)
        assert len(result) == 4
        for rows in result.values():
            assert len(rows) == 7

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            RotationScan(
                rotation_axis=np.array([1.0, 0.0, 0.0]),
                b_magnitude=10.0,
                angle_grid=np.array([10.0, 5.0]),
            )
        with pytest.raises(ValueError):
            RotationScan(
                rotation_axis=np.array([1.0, 0.0, 0.0]),
                b_magnitude=10.0,
                angle_grid=np.array([0.0, 500.0]),
            )
