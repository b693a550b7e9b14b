"""nvspin: spin physics of single NV centers in diamond.

Predicts ODMR line positions from the triplet spin Hamiltonian, synthesizes
photodynamics observables (spectra, spin-selective fluorescence decays, Rabi
nutation, level-anti-crossing dips) from a seven-level rate model, and
recovers physical parameters from data by least squares.
"""

__version__ = "0.1.0"

from .constants import BOHR_MAGNETON_MHZ_PER_G, CONSTANTS, PhysicalConstants
from .exceptions import (
    DegenerateSteadyStateError,
    FitDomainError,
    RankDeficiencyError,
    UndefinedPolarizationError,
    ValidationError,
)
from .hamiltonian import (
    EigenSystem,
    SpinParams,
    TransitionPair,
    build_hamiltonian,
    diagonalize,
    esr_frequencies,
    high_field_approx,
    lac_field,
)
from .geometry import (
    NV_AXES,
    FieldVector,
    NVOrientation,
    RotationScan,
    all_orientations,
    lab_to_nv,
    rotate_about_axis,
    rotation_scan_all_orientations,
    rotation_scan_frequencies,
)
from .rates import (
    LevelPopulations,
    MicrowaveDrive,
    RateParams,
    TransitionContext,
    evolve,
    pl_rate,
    polarization,
    rate_matrix,
    steady_state,
)
from .sequence import (
    DecayHistogram,
    LaserPulse,
    MwPulse,
    PsExcitation,
    PulseSequence,
    Readout,
    Wait,
    rabi_curve,
    run_sequence,
    sequence_from_dict,
    sequence_from_json,
)
from .spectra import (
    LacScan,
    OdmrDriveTemplate,
    OdmrSpectrum,
    detect_dips,
    lac_scan,
    odmr_spectrum,
    zeeman_scan,
)
from .fitting import (
    DataSeries,
    FitResult,
    fit_exponential,
    fit_lorentzian_dips,
    fit_nonlinear_zeeman,
    fit_piecewise_decay,
    fit_zeeman,
)
