"""Physical constants used throughout the package.

Unit conventions: energies and frequencies in MHz (plain frequencies, not
angular), magnetic fields in gauss, times in ns, rates in 1/ns.
"""

from dataclasses import dataclass

# Bohr magneton divided by Planck's constant, in MHz per gauss.
BOHR_MAGNETON_MHZ_PER_G = 1.3996245

# 1 MHz expressed in 1/ns; converts MHz-valued rates into the per-ns
# rate units used by the photodynamics generator.
MHZ_TO_PER_NS = 1e-3


@dataclass(frozen=True)
class PhysicalConstants:
    """Single source of truth for constants shared by all modules."""

    bohr_magneton_mhz_per_gauss: float = BOHR_MAGNETON_MHZ_PER_G


CONSTANTS = PhysicalConstants()
