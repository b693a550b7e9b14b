"""Synthesized cw observables: ODMR spectra, Zeeman scans, and LAC scans.

All three compose the spin Hamiltonian eigenstructure with steady states of
the rate model. Photoluminescence is reported normalized: 1 corresponds to
the undriven (or unmixed, for LAC scans) steady-state level.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hamiltonian import (
    SpinParams,
    build_hamiltonian,
    diagonalize,
    esr_frequencies,
)
from .rates import (
    N_LEVELS,
    MicrowaveDrive,
    RateParams,
    TransitionContext,
    pl_rate,
    rate_matrix,
    steady_state,
)

# cw drive strengths used when a scan does not specify its own. Both are
# sized to keep the incoherent transfer rate W well below the competing
# relaxation rates, so dips stay in the linear-response regime and their
# centers track the transition frequencies instead of saturation-broadened
# minima. Linewidths: 10 MHz is a typical cw ground-state ODMR width, the
# excited-state line is an order of magnitude broader.
DEFAULT_GS_RABI_MHZ = 5.0
DEFAULT_GS_FWHM_MHZ = 10.0
DEFAULT_ES_RABI_MHZ = 10.0
DEFAULT_ES_FWHM_MHZ = 100.0


@dataclass(frozen=True)
class OdmrDriveTemplate:
    """Per-manifold cw drive magnitudes applied while sweeping frequency."""

    gs_rabi: float = DEFAULT_GS_RABI_MHZ
    gs_fwhm: float = DEFAULT_GS_FWHM_MHZ
    es_rabi: float = DEFAULT_ES_RABI_MHZ
    es_fwhm: float = DEFAULT_ES_FWHM_MHZ


@dataclass
class OdmrSpectrum:
    """Normalized PL versus drive frequency plus detected dip centers."""

    frequency_grid: np.ndarray
    pl: np.ndarray
    dip_centers: np.ndarray
    lac_flagged: bool = False


@dataclass
class LacScan:
    """Normalized PL versus field magnitude along a misaligned axis."""

    b_grid: np.ndarray
    pl: np.ndarray
    misalignment_deg: float
    trivially_flat: bool = False


def detect_dips(frequency_grid, pl) -> np.ndarray:
    """Locate dip centers as refined local minima below the plateau.

    A point counts as a dip when it is a local minimum lying more than
    three plateau-noise levels below 1; the center is then refined with a
    three-point parabola. Returns centers in ascending order.
    """
    f = np.asarray(frequency_grid, dtype=float)
    y = np.asarray(pl, dtype=float)
    top = np.sort(y)[int(0.9 * y.size) :]
    noise = max(float(np.std(top)), 1e-9)
    threshold = 1.0 - 3.0 * noise

    centers = []
    for i in range(1, y.size - 1):
        if y[i] >= threshold:
            continue
        if not (y[i] < y[i - 1] and y[i] <= y[i + 1]):
            continue
        denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
        if denom <= 0:
            centers.append(f[i])
            continue
        shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
        step = 0.5 * (f[i + 1] - f[i - 1])
        centers.append(f[i] + shift * step)
    return np.array(sorted(centers))


def _transition_drives(template: OdmrDriveTemplate, f: float) -> list:
    drives = []
    for manifold, rabi, fwhm in (
        ("ground", template.gs_rabi, template.gs_fwhm),
        ("excited", template.es_rabi, template.es_fwhm),
    ):
        for transition in ("0,-1", "0,+1"):
            drives.append(
                MicrowaveDrive(
                    frequency=f,
                    rabi_frequency=rabi,
                    linewidth_fwhm=fwhm,
                    target_manifold=manifold,
                    target_transition=transition,
                )
            )
    return drives


def odmr_spectrum(
    gs: SpinParams,
    es: SpinParams,
    rp: RateParams,
    drive_template: OdmrDriveTemplate,
    b_nv,
    frequency_grid_mhz,
) -> OdmrSpectrum:
    """cw ODMR spectrum: steady-state PL versus microwave frequency.

    At each grid frequency the drive template is applied against all four
    transitions (ground/excited x 0<->-1 / 0<->+1) at their eigenstructure
    frequencies; PL is normalized to the undriven steady state, so dips
    appear at every transition the drive reaches. A spectrum overlapping a
    level anti-crossing (a transition frequency below the drive linewidth)
    is flagged rather than rejected.
    """
    grid = np.asarray(frequency_grid_mhz, dtype=float)
    ctx = TransitionContext(
        ground=esr_frequencies(gs, b_nv), excited=esr_frequencies(es, b_nv)
    )
    lac_flagged = (
        ctx.ground.omega_minus <= drive_template.gs_fwhm
        or ctx.excited.omega_minus <= drive_template.es_fwhm
    )

    baseline = pl_rate(steady_state(rate_matrix(rp, laser_on=True)), rp)
    pl = np.empty_like(grid)
    for i, f in enumerate(grid):
        gen = rate_matrix(
            rp, laser_on=True, cw_drive=_transition_drives(drive_template, f),
            esr_context=ctx,
        )
        pl[i] = pl_rate(steady_state(gen), rp) / baseline
    return OdmrSpectrum(
        frequency_grid=grid,
        pl=pl,
        dip_centers=detect_dips(grid, pl),
        lac_flagged=lac_flagged,
    )


def zeeman_scan(params: SpinParams, b_grid_gauss) -> list:
    """Transition frequencies versus axial field magnitude.

    Returns a list of (b_gauss, omega_minus, omega_plus) computed through
    full diagonalization; for E=0 this matches the closed form D +/- g*mu*B
    below the anti-crossing and |D - g*mu*B| above it.
    """
    out = []
    for b in np.asarray(b_grid_gauss, dtype=float):
        pair = esr_frequencies(params, (0.0, 0.0, float(b)))
        out.append((float(b), pair.omega_minus, pair.omega_plus))
    return out


def _overlap_matrix(params: SpinParams, b_nv) -> np.ndarray:
    """overlaps[i, b] = |<basis b|eigenstate i>|^2 in the {+1, 0, -1} basis."""
    eig = diagonalize(build_hamiltonian(params, b_nv))
    return np.abs(eig.states.T) ** 2


def lac_scan(
    gs: SpinParams,
    es: SpinParams,
    rp: RateParams,
    b_grid_gauss,
    misalignment_deg: float,
) -> LacScan:
    """Steady-state PL versus field magnitude near the level anti-crossings.

    The field is tilted by the misalignment angle from the NV axis; at each
    magnitude the spin-selective rates are re-expressed in the instantaneous
    eigenbasis of each manifold, so eigenstate mixing near the excited- and
    ground-state anti-crossings degrades the optical polarization cycle and
    produces PL dips. PL is normalized to the unmixed steady state. A scan
    with no mixing channel at all (zero misalignment and zero strain) is
    returned flat and flagged.
    """
    grid = np.asarray(b_grid_gauss, dtype=float)
    theta = np.deg2rad(misalignment_deg)
    trivially_flat = (
        abs(np.sin(theta)) < 1e-15 and gs.e_strain == 0.0 and es.e_strain == 0.0
    )

    baseline = pl_rate(steady_state(rate_matrix(rp, laser_on=True)), rp)
    pl = np.empty_like(grid)
    if trivially_flat:
        pl[:] = 1.0
        return LacScan(
            b_grid=grid, pl=pl, misalignment_deg=misalignment_deg, trivially_flat=True
        )

    for i, b in enumerate(grid):
        b_nv = (b * np.sin(theta), 0.0, b * np.cos(theta))
        gen = mixed_rate_matrix(rp, _overlap_matrix(gs, b_nv), _overlap_matrix(es, b_nv))
        pl[i] = pl_rate(steady_state(gen), rp) / baseline
    return LacScan(b_grid=grid, pl=pl, misalignment_deg=misalignment_deg)


def mixed_rate_matrix(
    rp: RateParams, gs_overlaps: np.ndarray, es_overlaps: np.ndarray
) -> np.ndarray:
    """Generator with every spin-selective channel projected onto eigenstates.

    gs_overlaps[i, b] and es_overlaps[i, b] are |<basis b|eigenstate i>|^2
    in the {+1, 0, -1} basis ordering of the Hamiltonian module.
    """
    # Spin-basis transfer rates in level order {g0, g+1, g-1, e0, e+1, e-1, s}.
    transfer = np.zeros((N_LEVELS, N_LEVELS))
    for k in range(3):
        transfer[3 + k, k] = rp.pump_rate
        transfer[k, 3 + k] = rp.gamma_rad
    transfer[6, 3] = rp.k_isc_0
    transfer[6, 4] = rp.k_isc_1
    transfer[6, 5] = rp.k_isc_1
    transfer[0, 6] = rp.gamma_s * rp.branch_0
    transfer[1, 6] = rp.gamma_s * (1.0 - rp.branch_0) / 2.0
    transfer[2, 6] = rp.gamma_s * (1.0 - rp.branch_0) / 2.0

    # Map the spin-label columns from the Hamiltonian basis {+1, 0, -1} to
    # the level order (ms0, ms+1, ms-1); rows stay eigenstates in energy
    # order, which only fixes a labeling within each manifold.
    perm = [1, 0, 2]
    big = np.eye(N_LEVELS)
    big[0:3, 0:3] = gs_overlaps[:, perm]
    big[3:6, 3:6] = es_overlaps[:, perm]

    rates = big @ transfer @ big.T
    gen = rates.copy()
    np.fill_diagonal(gen, 0.0)
    np.fill_diagonal(gen, -gen.sum(axis=0))
    return gen
