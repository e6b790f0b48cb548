"""Curve containers shared by the lifshitz and analysis modules.

Separations are metres, energies J/m^2, normalized forces N/m (force divided
by 2*pi*R). File emission converts to nm and uN/m at the boundary; see
tableio.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataQualityError

# instrument-grade default resolution of a normalized force curve, N/m
DEFAULT_NOISE_FLOOR = 1e-7


def _as_array(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DataQualityError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DataQualityError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class EnergyCurve:
    """Free energy of interaction per unit area versus separation."""

    separations: np.ndarray       # m, strictly increasing
    energy_per_area: np.ndarray   # J/m^2
    temperature: float            # K
    stack_label: str = ""

    def __post_init__(self):
        sep = _as_array(self.separations, "separations")
        en = _as_array(self.energy_per_area, "energy_per_area")
        if sep.size != en.size:
            raise DataQualityError("separations and energies differ in length")
        if np.any(np.diff(sep) <= 0):
            raise DataQualityError("separations must be strictly increasing")
        object.__setattr__(self, "separations", sep)
        object.__setattr__(self, "energy_per_area", en)


@dataclass(frozen=True)
class ForceCurve:
    """Normalized force curve F/(2 pi R) versus separation.

    Covers both computed and measured curves; metadata records the probe
    radius, temperature and the resolution floor of the instrument (or of the
    synthetic generator).
    """

    separations: np.ndarray       # m
    normalized_force: np.ndarray  # N/m
    radius: float                 # m, effective probe radius
    temperature: float = 298.0    # K
    noise_floor: float = DEFAULT_NOISE_FLOOR  # N/m
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        sep = _as_array(self.separations, "separations")
        f = _as_array(self.normalized_force, "normalized_force")
        if sep.size != f.size:
            raise DataQualityError("separations and forces differ in length")
        object.__setattr__(self, "separations", sep)
        object.__setattr__(self, "normalized_force", f)

    def sorted(self):
        """Copy with points ordered by increasing separation."""
        order = np.argsort(self.separations, kind="stable")
        return ForceCurve(self.separations[order], self.normalized_force[order],
                          self.radius, self.temperature, self.noise_floor,
                          dict(self.metadata))


@dataclass(frozen=True)
class ErrorProfile:
    """Accumulated rms error against a model, per upper integration bound."""

    upper_bounds: np.ndarray           # m, increasing
    accumulated_rms: np.ndarray        # N/m
    relative_to_shortest: np.ndarray   # dimensionless, rms / |model(lower bound)|

    def __post_init__(self):
        ub = _as_array(self.upper_bounds, "upper_bounds")
        rms = _as_array(self.accumulated_rms, "accumulated_rms")
        rel = _as_array(self.relative_to_shortest, "relative_to_shortest")
        if not (ub.size == rms.size == rel.size):
            raise DataQualityError("profile arrays differ in length")
        if np.any(np.diff(ub) <= 0):
            raise DataQualityError("upper_bounds must be strictly increasing")
        object.__setattr__(self, "upper_bounds", ub)
        object.__setattr__(self, "accumulated_rms", rms)
        object.__setattr__(self, "relative_to_shortest", rel)
