"""Dispersion forces between coated metal surfaces at 20-300 nm separations.

Lifshitz theory over tabulated or model permittivities, the proximity
relation for sphere-plate and crossed-cylinder probes, JKR contact mechanics
past the jump-in, and the measurement-side toolkit (curve averaging,
offset/electrostatic fitting, accumulated error profiles, synthetic
approach curves). The `casimirlab` command renders each of these as a
delimited table plus a figure.
"""

__version__ = "0.1.0"

from .analysis import (FitResult, average_curves, electrostatic_term, fit_curve,
                       model_discrimination_study, rms_at_offset,
                       rms_error_profile, synthesize_measurement)
from .constants import CONSTANTS_VERSION
from .contact import (ContactSystem, Material, jkr_central_displacement,
                      jkr_contact_radius, pull_off_force, select_model,
                      tabor_parameter)
from .curves import EnergyCurve, ErrorProfile, ForceCurve
from .dielectric import (Constant, Drude, OpticalDataTable, Plasma,
                         SingleOscillator, TabulatedKK, Vacuum,
                         WaterOscillators, build_gold_model, drude_eps,
                         ev_to_plasma_wavelength, kk_transform,
                         plasma_frequency_from_density)
from .errors import (AccuracyError, CasimirLabError, ConfigError,
                     DataQualityError, DomainError, FitError, GeometryError,
                     NoContactError, UsageError, ValidityError)
from .geometry import (CrossedCylinders, ParallelPlates, RoughnessSpec,
                       SphereOnFlat, apply_corrections, casimir_force_curved,
                       casimir_pressure_plates, effective_radius,
                       ideal_energy_per_area, roughness_factor,
                       temperature_parameter)
from .lifshitz import (LayerStack, MatsubaraContext, composite_delta_31,
                       energy_curve, free_energy_per_area,
                       free_energy_with_stats, fresnel_deltas, integrand_I,
                       normalized_force_curve)

__all__ = [name for name in dir() if not name.startswith("_")]
