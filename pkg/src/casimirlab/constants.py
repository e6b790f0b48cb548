"""Shared physical constants.

Every module pulls its constants from here so that cross-module identities
(proximity force theorem checks, Matsubara frequencies, ideal-limit formulas)
agree to the last digit. Values are scipy's CODATA table; k_B, hbar, c and e
are fixed by the SI definitions.
"""

from scipy.constants import (
    Boltzmann as K_B,
    hbar as HBAR,
    c as C_LIGHT,
    elementary_charge as E_CHARGE,
    epsilon_0 as EPS_0,
    electron_mass as M_E,
)

# stamped into output-file headers; bump if the constants source ever changes
CONSTANTS_VERSION = "codata-scipy-1"

__all__ = [
    "K_B", "HBAR", "C_LIGHT", "E_CHARGE", "EPS_0", "M_E", "CONSTANTS_VERSION",
]
