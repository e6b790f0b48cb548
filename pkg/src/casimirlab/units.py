"""Parsing of dimensioned quantities written as "value unit" strings.

Config values and CLI flags carry explicit unit suffixes ("2.1 nm", "298 K",
"100 N/m"); bare numbers are accepted only for dimensionless quantities.
Internally everything is SI, angular frequencies in rad/s.
"""

import re

from .constants import C_LIGHT, E_CHARGE, HBAR
from .errors import ConfigError

TWO_PI = 6.283185307179586

# SI factor per accepted spelling, keyed by dimension
_UNIT_TABLES = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9, "A": 1e-10},
    "temperature": {"K": 1.0},
    "pressure": {"Pa": 1.0, "kPa": 1e3, "MPa": 1e6, "GPa": 1e9},
    "force": {"N": 1.0, "mN": 1e-3, "uN": 1e-6, "nN": 1e-9},
    "stiffness": {"N/m": 1.0},
    "force_per_length": {"N/m": 1.0, "uN/m": 1e-6, "nN/m": 1e-9},
    "energy_per_area": {"J/m^2": 1.0, "mJ/m^2": 1e-3},
    "speed": {"m/s": 1.0, "um/s": 1e-6, "nm/s": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "rate": {"Hz": 1.0, "kHz": 1e3},
    "alpha": {"N*m": 1.0, "N*m^2": 1.0, "N": 1.0},  # electrostatic coefficient, exponent-dependent
    "number_density": {"1/m^3": 1.0, "m^-3": 1.0},
}

_QUANTITY_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([A-Za-z/*^\-0-9]*)\s*$")


def parse_quantity(text, dimension):
    """Parse "value unit" into an SI float for the given dimension.

    Raises ConfigError if the unit is missing, unknown for the dimension, or
    the number is malformed.
    """
    if dimension == "frequency":
        return parse_frequency(text)
    table = _UNIT_TABLES.get(dimension)
    if table is None:
        raise ConfigError(f"unknown dimension {dimension!r}")
    m = _QUANTITY_RE.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}")
    value_str, unit = m.group(1), m.group(2)
    try:
        value = float(value_str)
    except ValueError:
        raise ConfigError(f"bad number in quantity {text!r}") from None
    if not unit:
        raise ConfigError(f"quantity {text!r} needs an explicit unit ({'/'.join(table)})")
    if unit not in table:
        raise ConfigError(f"unit {unit!r} not valid for {dimension} (accepted: {', '.join(table)})")
    return value * table[unit]


def parse_frequency(text):
    """Parse an angular frequency given in rad/s, eV or nm into rad/s.

    eV converts via E/hbar, nm via 2*pi*c/lambda, matching the optical-table
    ingestion tags.
    """
    m = _QUANTITY_RE.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse frequency {text!r}")
    try:
        value = float(m.group(1))
    except ValueError:
        raise ConfigError(f"bad number in frequency {text!r}") from None
    unit = m.group(2)
    if not unit:
        raise ConfigError(f"frequency {text!r} needs a unit (rad/s, eV or nm)")
    return convert_frequency(value, unit)


def convert_frequency(value, unit):
    """Convert a frequency sample with a unit tag (rad_s | eV | nm) to rad/s."""
    u = unit.replace("/", "_")
    if u == "rad_s":
        return float(value)
    if u == "eV":
        return float(value) * E_CHARGE / HBAR
    if u == "nm":
        if value <= 0:
            raise ConfigError("wavelength must be positive")
        return TWO_PI * C_LIGHT / (float(value) * 1e-9)
    raise ConfigError(f"unknown frequency unit {unit!r} (accepted: rad_s, eV, nm)")


def parse_float(text, what="value"):
    """Parse a dimensionless number, with a ConfigError naming the field on failure."""
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"bad {what}: {text!r}") from None
