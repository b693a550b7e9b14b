"""Triplet (S=1) spin Hamiltonian of a single NV center and its spectrum.

The Hamiltonian in the NV frame (z along the NV symmetry axis) is

    H = D (Sz^2 - 2/3) + E (Sx^2 - Sy^2) + g mu (Bx Sx + By Sy + Bz Sz)

with D the axial zero-field splitting, E the transverse strain splitting
(both MHz), g the electronic g-factor and mu the Bohr magneton in MHz/G.
Everything is expressed in the {ms=+1, 0, -1} basis, which makes Sz the
diagonal matrix diag(1, 0, -1). Energies are MHz, fields gauss.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import BOHR_MAGNETON_MHZ_PER_G
from ._kernels import eigh3_jacobi

_SQ2 = 1.0 / np.sqrt(2.0)

# Standard S=1 operators in the {+1, 0, -1} basis.
SX = np.array(
    [[0.0, _SQ2, 0.0], [_SQ2, 0.0, _SQ2], [0.0, _SQ2, 0.0]], dtype=np.complex128
)
SY = np.array(
    [[0.0, -1j * _SQ2, 0.0], [1j * _SQ2, 0.0, -1j * _SQ2], [0.0, 1j * _SQ2, 0.0]],
    dtype=np.complex128,
)
SZ = np.array(
    [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]], dtype=np.complex128
)
SPIN_OPERATORS = (SX, SY, SZ)

# Index of |ms=0> in the {+1, 0, -1} ordering.
MS0_BASIS_INDEX = 1

_D_TERM = SZ @ SZ - (2.0 / 3.0) * np.eye(3)
_E_TERM = SX @ SX - SY @ SY

HERMITICITY_RTOL = 1e-9


@dataclass(frozen=True)
class SpinParams:
    """Zero-field splitting, strain splitting, and g-factor of one manifold.

    Parameters
    ----------
    d_zfs : float
        Axial zero-field splitting in MHz; must be positive.
    e_strain : float
        Transverse strain splitting in MHz; 0 <= e_strain < d_zfs.
    g_factor : float
        Dimensionless electronic g-factor; must be positive.
    """

    d_zfs: float
    e_strain: float = 0.0
    g_factor: float = 2.0028

    def __post_init__(self):
        if not np.isfinite([self.d_zfs, self.e_strain, self.g_factor]).all():
            raise ValueError("spin parameters must be finite")
        if self.d_zfs <= 0:
            raise ValueError(f"d_zfs must be > 0, got {self.d_zfs}")
        if self.e_strain < 0:
            raise ValueError(f"e_strain must be >= 0, got {self.e_strain}")
        if self.g_factor <= 0:
            raise ValueError(f"g_factor must be > 0, got {self.g_factor}")
        if self.e_strain >= self.d_zfs:
            raise ValueError(
                f"e_strain ({self.e_strain}) must be smaller than d_zfs ({self.d_zfs})"
            )


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of one spin Hamiltonian.

    energies are ascending (MHz); states holds the matching orthonormal
    eigenvectors as columns; ms0_index points at the eigenstate with the
    largest |<ms=0|psi>|^2 overlap (ties broken toward lower energy).
    """

    energies: np.ndarray
    states: np.ndarray
    ms0_index: int


class TransitionPair(NamedTuple):
    """The two ESR frequencies out of the ms=0-like eigenstate, lower first."""

    omega_minus: float
    omega_plus: float


def build_hamiltonian(params: SpinParams, b_nv) -> np.ndarray:
    """Build the 3x3 spin Hamiltonian for a field given in the NV frame.

    Parameters
    ----------
    params : SpinParams
    b_nv : array-like of 3 floats
        Magnetic field components (gauss) with z along the NV axis.

    Returns
    -------
    numpy.ndarray
        Complex Hermitian, traceless 3x3 matrix in MHz, basis {+1, 0, -1}.
    """
    b = np.asarray(b_nv, dtype=float)
    if b.shape != (3,):
        raise ValueError(f"field must have 3 components, got shape {b.shape}")
    if not np.isfinite(b).all():
        raise ValueError("field components must be finite")
    zeeman = params.g_factor * BOHR_MAGNETON_MHZ_PER_G * (
        b[0] * SX + b[1] * SY + b[2] * SZ
    )
    return params.d_zfs * _D_TERM + params.e_strain * _E_TERM + zeeman


def check_hermitian(h, rtol=HERMITICITY_RTOL):
    """Raise if h is not Hermitian within rtol relative to its norm."""
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {h.shape}")
    if not np.isfinite(h.view(float)).all():
        raise ValueError("matrix entries must be finite")
    scale = max(np.linalg.norm(h), 1.0)
    dev = np.max(np.abs(h - h.conj().T))
    if dev > rtol * scale:
        raise ValueError(
            f"matrix is not Hermitian (deviation {dev:.3e} > {rtol:.0e} relative)"
        )
    return h


def diagonalize(h) -> EigenSystem:
    """Spectral decomposition of a Hermitian 3x3 matrix via cyclic Jacobi.

    Raises
    ------
    ValueError
        If the input deviates from Hermiticity by more than 1e-9 relative.
    """
    h = check_hermitian(h)
    energies, states = eigh3_jacobi(h)
    overlaps = np.abs(states[MS0_BASIS_INDEX, :]) ** 2
    best = 0
    for k in (1, 2):
        if overlaps[k] > overlaps[best] + 1e-9:
            best = k
    # energies ascend, so equal-overlap ties already resolve to lower energy
    return EigenSystem(energies=energies, states=states, ms0_index=best)


def esr_frequencies(params: SpinParams, b_nv) -> TransitionPair:
    """ESR transition frequencies from the ms=0-like eigenstate.

    Computed as |E_k - E_ms0| for the two other eigenstates of the full
    Hamiltonian; for E=0 and an axial field below the anti-crossing this
    reduces to the closed form D +/- g*mu*B.
    """
    eig = diagonalize(build_hamiltonian(params, b_nv))
    others = [k for k in range(3) if k != eig.ms0_index]
    freqs = sorted(abs(eig.energies[k] - eig.energies[eig.ms0_index]) for k in others)
    return TransitionPair(freqs[0], freqs[1])


def high_field_approx(params: SpinParams, b_magnitude: float) -> TransitionPair:
    """Closed-form axial-field frequencies D -/+ g*mu*B.

    Valid when the Zeeman splitting dominates the strain term; above the
    anti-crossing field the lower branch goes negative as written.
    """
    zeeman = params.g_factor * BOHR_MAGNETON_MHZ_PER_G * b_magnitude
    return TransitionPair(params.d_zfs - zeeman, params.d_zfs + zeeman)


def lac_field(params: SpinParams) -> float:
    """Axial field (gauss) where the lower transition crosses zero: D/(g*mu)."""
    return params.d_zfs / (params.g_factor * BOHR_MAGNETON_MHZ_PER_G)
