"""Crystal-frame bookkeeping for NV centers in a cubic diamond lattice.

The four NV orientations lie along the body diagonals {[1,1,1], [1,-1,-1],
[-1,1,-1], [-1,-1,1]}/sqrt(3). Lab-frame vectors are expressed in the cubic
crystal axes; the NV frame has z along the center's symmetry axis and x along
the projection of the crystal [1,-1,0] direction onto the plane perpendicular
to the axis (the choice is observable only when the strain term is nonzero).
Angles are degrees at every interface, radians internally.
"""

from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import SpinParams, TransitionPair, esr_frequencies

NV_AXES = tuple(
    np.array(a, dtype=float) / np.sqrt(3.0)
    for a in ([1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1])
)

_X_REFERENCE = np.array([1.0, -1.0, 0.0])


@dataclass(frozen=True)
class FieldVector:
    """Magnetic field components in gauss; frame stated by the consumer."""

    bx: float
    by: float
    bz: float

    def __post_init__(self):
        if not np.isfinite([self.bx, self.by, self.bz]).all():
            raise ValueError("field components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz])


def _as_vec(v) -> np.ndarray:
    if isinstance(v, FieldVector):
        return v.as_array()
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("vector components must be finite")
    return arr


def unit(v) -> np.ndarray:
    arr = _as_vec(v)
    n = np.linalg.norm(arr)
    if n == 0:
        raise ValueError("cannot normalize a zero vector")
    return arr / n


@dataclass(frozen=True)
class NVOrientation:
    """One of the four NV symmetry axes plus its transverse x-axis convention."""

    axis: np.ndarray
    x_axis: np.ndarray = field(init=False)
    y_axis: np.ndarray = field(init=False)

    def __post_init__(self):
        ax = unit(self.axis)
        object.__setattr__(self, "axis", ax)
        ref = _X_REFERENCE - np.dot(_X_REFERENCE, ax) * ax
        if np.linalg.norm(ref) < 1e-9:
            ref = np.array([1.0, 0.0, -1.0])
            ref = ref - np.dot(ref, ax) * ax
        x = ref / np.linalg.norm(ref)
        object.__setattr__(self, "x_axis", x)
        object.__setattr__(self, "y_axis", np.cross(ax, x))

    @classmethod
    def from_index(cls, idx: int) -> "NVOrientation":
        return cls(axis=NV_AXES[idx])


def all_orientations() -> tuple:
    """The four crystallographically distinct NV orientations."""
    return tuple(NVOrientation(axis=a) for a in NV_AXES)


def rotate_about_axis(v, axis, angle_deg: float) -> np.ndarray:
    """Rodrigues rotation of v about a normalized axis by angle_deg degrees."""
    vec = _as_vec(v)
    ax = unit(axis)
    theta = np.deg2rad(angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    return vec * c + np.cross(ax, vec) * s + ax * np.dot(ax, vec) * (1.0 - c)


def lab_to_nv(b, orientation: NVOrientation) -> np.ndarray:
    """Express a lab-frame field in the NV frame of one orientation."""
    vec = _as_vec(b)
    return np.array(
        [
            np.dot(vec, orientation.x_axis),
            np.dot(vec, orientation.y_axis),
            np.dot(vec, orientation.axis),
        ]
    )


@dataclass(frozen=True)
class RotationScan:
    """Rotation of a fixed-magnitude field about a crystal axis.

    angle_grid is in degrees, ascending, spanning at most one full turn.
    """

    rotation_axis: np.ndarray
    b_magnitude: float
    angle_grid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation_axis", unit(self.rotation_axis))
        grid = np.asarray(self.angle_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("angle_grid must be a non-empty 1-d array")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("angle_grid must be strictly ascending")
        if grid[-1] - grid[0] > 360.0 + 1e-9:
            raise ValueError("angle_grid must span at most one full turn")
        if self.b_magnitude < 0:
            raise ValueError("b_magnitude must be >= 0")
        object.__setattr__(self, "angle_grid", grid)


def rotation_scan_frequencies(
    scan: RotationScan,
    initial_b_direction,
    params: SpinParams,
    orientation: NVOrientation,
) -> list:
    """ESR frequencies of one NV while the field rotates about a crystal axis.

    Returns
    -------
    list of (angle_deg, omega_minus, omega_plus)
        One entry per grid angle, in grid order.
    """
    b0 = scan.b_magnitude * unit(initial_b_direction)
    out = []
    for angle in scan.angle_grid:
        b_lab = rotate_about_axis(b0, scan.rotation_axis, angle)
        pair = esr_frequencies(params, lab_to_nv(b_lab, orientation))
        out.append((float(angle), pair.omega_minus, pair.omega_plus))
    return out


def rotation_scan_all_orientations(
    scan: RotationScan, initial_b_direction, params: SpinParams
) -> dict:
    """Same scan evaluated for all four NV orientations, keyed by axis tuple."""
    return {
        tuple(np.round(o.axis * np.sqrt(3.0)).astype(int)): rotation_scan_frequencies(
            scan, initial_b_direction, params, o
        )
        for o in all_orientations()
    }
