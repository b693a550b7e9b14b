"""Seven-level incoherent rate model of NV photodynamics.

Level ordering is {g0, g+1, g-1, e0, e+1, e-1, s}: the three ground-state
spin sublevels, the three excited-state sublevels, and the metastable
singlet shelf. Optical pumping and radiative decay are spin conserving;
intersystem crossing into the shelf is spin selective (much stronger from
ms=+/-1 than from ms=0), and the shelf decays preferentially into g0. All
rates are per ns.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constants import MHZ_TO_PER_NS
from .exceptions import DegenerateSteadyStateError, UndefinedPolarizationError
from .hamiltonian import TransitionPair
from ._kernels import rk45_linear

N_LEVELS = 7
LEVEL_NAMES = ("g0", "g+1", "g-1", "e0", "e+1", "e-1", "s")
GROUND_SLICE = slice(0, 3)
EXCITED_SLICE = slice(3, 6)
SINGLET = 6

EVOLVE_ABS_TOL = 1e-10

# Default optical pump rate: 10% of the radiative rate, a typical
# below-saturation cw excitation level. Configurable everywhere.
DEFAULT_PUMP_RATE = 0.1 / 23.0


@dataclass(frozen=True)
class RateParams:
    """All incoherent rates of the seven-level model, per ns.

    The defaults put the entire 1/23 ns^-1 decay of the ms=0 excited
    sublevel into the radiative channel (k_isc_0 = 0) and size k_isc_1 so
    the ms=-1 sublevel decays at 1/12.7 ns^-1 in total. The singlet
    lifetime (1/gamma_s = 300 ns) is an external-literature placeholder,
    and branch_0 = 1 routes all shelf decay into g0; every value is
    independently configurable.
    """

    pump_rate: float = DEFAULT_PUMP_RATE
    gamma_rad: float = 1.0 / 23.0
    k_isc_0: float = 0.0
    k_isc_1: float = 1.0 / 12.7 - 1.0 / 23.0
    gamma_s: float = 1.0 / 300.0
    branch_0: float = 1.0

    def __post_init__(self):
        rates = [
            self.pump_rate,
            self.gamma_rad,
            self.k_isc_0,
            self.k_isc_1,
            self.gamma_s,
        ]
        if not np.isfinite(rates + [self.branch_0]).all():
            raise ValueError("rate parameters must be finite")
        if min(rates) < 0:
            raise ValueError("all rates must be >= 0")
        if not 0.0 <= self.branch_0 <= 1.0:
            raise ValueError(f"branch_0 must lie in [0, 1], got {self.branch_0}")
        if self.k_isc_0 > self.k_isc_1:
            raise ValueError(
                "k_isc_0 must not exceed k_isc_1 (shelving from ms=0 is the weak channel)"
            )


@dataclass(frozen=True)
class MicrowaveDrive:
    """A cw or pulsed microwave tone addressing one spin transition.

    frequency, rabi_frequency and linewidth_fwhm are MHz;
    target_transition is "0,-1" or "0,+1" within target_manifold
    ("ground" or "excited").
    """

    frequency: float
    rabi_frequency: float
    linewidth_fwhm: float
    target_manifold: str = "ground"
    target_transition: str = "0,-1"

    def __post_init__(self):
        if self.rabi_frequency < 0:
            raise ValueError("rabi_frequency must be >= 0")
        if self.linewidth_fwhm <= 0:
            raise ValueError("linewidth_fwhm must be > 0")
        if self.target_manifold not in ("ground", "excited"):
            raise ValueError(f"unknown target_manifold {self.target_manifold!r}")
        if self.target_transition not in ("0,-1", "0,+1"):
            raise ValueError(f"unknown target_transition {self.target_transition!r}")

    def level_pair(self) -> tuple:
        base = 0 if self.target_manifold == "ground" else 3
        partner = 2 if self.target_transition == "0,-1" else 1
        return base, base + partner


@dataclass(frozen=True)
class TransitionContext:
    """Transition frequencies the cw drives are referenced against."""

    ground: Optional[TransitionPair] = None
    excited: Optional[TransitionPair] = None

    def frequency_for(self, drive: MicrowaveDrive) -> float:
        pair = self.ground if drive.target_manifold == "ground" else self.excited
        if pair is None:
            raise ValueError(
                f"transition context is missing the {drive.target_manifold} manifold"
            )
        return (
            pair.omega_minus
            if drive.target_transition == "0,-1"
            else pair.omega_plus
        )


class LevelPopulations:
    """Probability vector over the seven levels.

    Entries below -1e-12 are rejected; tiny negatives from integration
    round-off are clipped to zero. The total must equal 1 to 1e-9.
    """

    __slots__ = ("p",)

    def __init__(self, p):
        arr = np.asarray(p, dtype=float).copy()
        if arr.shape != (N_LEVELS,):
            raise ValueError(f"populations must have {N_LEVELS} entries")
        if not np.isfinite(arr).all():
            raise ValueError("populations must be finite")
        if arr.min() < -1e-12:
            raise ValueError(f"negative population {arr.min():.3e}")
        arr[arr < 0] = 0.0
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"populations must sum to 1, got {arr.sum()!r}")
        self.p = arr

    @classmethod
    def ground_thermal(cls) -> "LevelPopulations":
        p = np.zeros(N_LEVELS)
        p[GROUND_SLICE] = 1.0 / 3.0
        return cls(p)

    @classmethod
    def pure(cls, level: int) -> "LevelPopulations":
        p = np.zeros(N_LEVELS)
        p[level] = 1.0
        return cls(p)

    def __getitem__(self, idx):
        return self.p[idx]

    def ground(self) -> np.ndarray:
        return self.p[GROUND_SLICE]

    def excited(self) -> np.ndarray:
        return self.p[EXCITED_SLICE]

    def __repr__(self):
        entries = ", ".join(f"{n}={v:.4g}" for n, v in zip(LEVEL_NAMES, self.p))
        return f"LevelPopulations({entries})"


def lorentzian_unit_peak(detuning: float, fwhm: float) -> float:
    """Lorentzian with unit peak value and the given full width at half maximum."""
    half = 0.5 * fwhm
    return half * half / (detuning * detuning + half * half)


def drive_rate_per_ns(drive: MicrowaveDrive, transition_frequency: float) -> float:
    """Incoherent two-way transfer rate of a cw drive, in 1/ns.

    W = rabi^2 / (2 * linewidth) * L(f - f0) with L a unit-peak Lorentzian
    centered on the transition; the MHz result is converted to 1/ns.
    """
    w_mhz = (
        drive.rabi_frequency**2
        / (2.0 * drive.linewidth_fwhm)
        * lorentzian_unit_peak(drive.frequency - transition_frequency, drive.linewidth_fwhm)
    )
    return w_mhz * MHZ_TO_PER_NS


def rate_matrix(
    rp: RateParams,
    laser_on: bool,
    cw_drive=None,
    esr_context: Optional[TransitionContext] = None,
) -> np.ndarray:
    """Assemble the 7x7 rate generator G with dp/dt = G @ p.

    Off-diagonal G[i, j] is the rate from level j into level i; each
    column sums to zero. cw_drive may be a single MicrowaveDrive or a
    sequence of them; each enters as a symmetric two-way transfer between
    its targeted pair, evaluated against the matching transition frequency
    from esr_context.
    """
    g = np.zeros((N_LEVELS, N_LEVELS))
    if laser_on:
        for k in range(3):
            g[3 + k, k] += rp.pump_rate
    for k in range(3):
        g[k, 3 + k] += rp.gamma_rad
    g[SINGLET, 3] += rp.k_isc_0
    g[SINGLET, 4] += rp.k_isc_1
    g[SINGLET, 5] += rp.k_isc_1
    g[0, SINGLET] += rp.gamma_s * rp.branch_0
    g[1, SINGLET] += rp.gamma_s * (1.0 - rp.branch_0) / 2.0
    g[2, SINGLET] += rp.gamma_s * (1.0 - rp.branch_0) / 2.0

    if cw_drive is not None:
        drives: Sequence[MicrowaveDrive] = (
            [cw_drive] if isinstance(cw_drive, MicrowaveDrive) else list(cw_drive)
        )
        if drives and esr_context is None:
            raise ValueError("esr_context is required when a cw drive is present")
        for drive in drives:
            w = drive_rate_per_ns(drive, esr_context.frequency_for(drive))
            i, j = drive.level_pair()
            g[i, j] += w
            g[j, i] += w

    np.fill_diagonal(g, 0.0)
    np.fill_diagonal(g, -g.sum(axis=0))
    return g


def sanitize_populations(p: np.ndarray) -> np.ndarray:
    """Clear integrator undershoot: clip negatives within tolerance, renormalize.

    Undershoot beyond 100x the integration tolerance indicates a genuine
    failure and is rejected.
    """
    if p.min() < -100.0 * EVOLVE_ABS_TOL:
        raise ValueError(f"population undershoot {p.min():.3e} exceeds tolerance")
    if p.min() < 0.0:
        p = np.where(p < 0.0, 0.0, p)
        p = p / p.sum()
    return p


def evolve(p0: LevelPopulations, generator, duration_ns: float, max_step=np.inf) -> LevelPopulations:
    """Propagate populations for duration_ns under a fixed generator.

    Adaptive embedded Runge-Kutta with 1e-10 absolute tolerance per
    component; probability is conserved to round-off because the generator
    columns sum to zero. Per-component undershoot below zero (bounded by
    the integration tolerance) is clipped away.
    """
    gen = np.asarray(generator, dtype=float)
    if gen.shape != (N_LEVELS, N_LEVELS):
        raise ValueError(f"generator must be {N_LEVELS}x{N_LEVELS}")
    if not np.isfinite(gen).all():
        raise ValueError("generator entries must be finite")
    if duration_ns < 0:
        raise ValueError("duration must be >= 0")
    p = rk45_linear(gen, p0.p, float(duration_ns), EVOLVE_ABS_TOL, float(max_step))
    return LevelPopulations(sanitize_populations(p))


def steady_state(generator) -> LevelPopulations:
    """Normalized stationary distribution of the generator.

    Raises
    ------
    DegenerateSteadyStateError
        If the kernel of the generator is more than one-dimensional
        (e.g. laser off, where every ground distribution is stationary).
    """
    gen = np.asarray(generator, dtype=float)
    _, svals, vh = np.linalg.svd(gen)
    scale = max(svals[0], 1e-30)
    null_dim = int(np.sum(svals < 1e-10 * scale))
    if null_dim != 1:
        raise DegenerateSteadyStateError(
            f"generator has a {null_dim}-dimensional stationary space"
        )
    p = vh[-1]
    if p.sum() < 0:
        p = -p
    p = np.where(p < 0, 0.0, p)
    return LevelPopulations(p / p.sum())


def pl_rate(p: LevelPopulations, rp: RateParams) -> float:
    """Photon emission rate gamma_rad * (total excited population), per ns."""
    return rp.gamma_rad * float(np.sum(p.excited()))


def polarization(p: LevelPopulations) -> float:
    """Ground-state spin polarization (p_g0 - p_g+1 - p_g-1) / (sum of ground)."""
    ground = p.ground()
    total = float(ground.sum())
    if total < 1e-12:
        raise UndefinedPolarizationError("ground manifold is empty")
    return float((ground[0] - ground[1] - ground[2]) / total)
