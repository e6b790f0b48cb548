"""Adhesive contact of a sphere on a flat: Tabor screening and the JKR model.

Once surfaces touch, the measured quantity switches from a dispersion force
to contact mechanics. The Tabor parameter decides which adhesion model is
appropriate (rigid-sphere DMT at small values, compliant JKR at large ones),
and the JKR relations give contact radius, central displacement and pull-off
for the compliant regime that soft or large spheres live in.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoContactError

DEFAULT_EQUILIBRIUM_DISTANCE = 3e-10  # m, typical interatomic spacing

# Tabor-parameter regime boundaries
DMT_BELOW = 0.1
JKR_ABOVE = 5.0


@dataclass(frozen=True)
class Material:
    """Isotropic elastic solid: Young's modulus (Pa) and Poisson ratio."""

    youngs_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise DomainError("Young's modulus must be positive")
        if not (0 < self.poisson_ratio < 0.5):
            raise DomainError("Poisson ratio must lie in (0, 0.5)")

    def compliance(self):
        """(1 - nu^2) / E, the term this side contributes to 1/K."""
        return (1.0 - self.poisson_ratio**2) / self.youngs_modulus


@dataclass(frozen=True)
class ContactSystem:
    """Sphere of one material on a flat of another, with adhesion.

    work_of_adhesion is the Dupre energy gamma in J/m^2;
    equilibrium_distance is the separation at which the surfaces are
    considered in contact, entering only through the Tabor parameter.
    """

    sphere: Material
    flat: Material
    radius: float
    work_of_adhesion: float
    equilibrium_distance: float = DEFAULT_EQUILIBRIUM_DISTANCE

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("sphere radius must be positive")
        if self.work_of_adhesion <= 0:
            raise DomainError("work of adhesion must be positive")
        if self.equilibrium_distance <= 0:
            raise DomainError("equilibrium distance must be positive")

    def stiffness(self):
        """Combined elastic constant K = [ (1-nu1^2)/E1 + (1-nu2^2)/E2 ]^-1, Pa."""
        return 1.0 / (self.sphere.compliance() + self.flat.compliance())


def tabor_parameter(system):
    """mu = (R gamma^2 / (K^2 D_e^3))^(1/3), the elasticity-to-range ratio."""
    k = system.stiffness()
    return (system.radius * system.work_of_adhesion**2
            / (k**2 * system.equilibrium_distance**3)) ** (1.0 / 3.0)


def select_model(mu):
    """Adhesion model for a Tabor parameter: 'dmt', 'jkr' or 'transition'."""
    if mu <= 0:
        raise DomainError("Tabor parameter must be positive")
    if mu < DMT_BELOW:
        return "dmt"
    if mu > JKR_ABOVE:
        return "jkr"
    return "transition"


def pull_off_force(system):
    """JKR pull-off force -(3/2) pi gamma R, N (negative: tensile)."""
    return -1.5 * math.pi * system.work_of_adhesion * system.radius


def jkr_contact_radius(system, applied_force):
    """JKR contact radius under an applied load, m.

        a^3 = (R/K) [ F + 3 pi gamma R + sqrt(6 pi gamma R F + (3 pi gamma R)^2) ]

    applied_force may be an array. Loads below the pull-off force have no
    stable contact and raise NoContactError.
    """
    f = np.asarray(applied_force, dtype=float)
    r, k = system.radius, system.stiffness()
    adh = 3.0 * math.pi * system.work_of_adhesion * r
    disc = 2.0 * adh * f + adh**2
    if np.any(disc < 0):
        raise NoContactError(
            f"load below the pull-off force {pull_off_force(system):.4e} N; "
            "no stable contact")
    a3 = (r / k) * (f + adh + np.sqrt(disc))
    out = a3 ** (1.0 / 3.0)
    return float(out) if np.ndim(applied_force) == 0 else out


def jkr_central_displacement(system, contact_radius):
    """Central displacement delta = a^2/R - sqrt(2 pi gamma a / K), m.

    Negative values mean the sphere centre sits above the undeformed surface
    (adhesion neck near pull-off).
    """
    a = np.asarray(contact_radius, dtype=float)
    if np.any(a < 0):
        raise DomainError("contact radius must be >= 0")
    k = system.stiffness()
    out = a**2 / system.radius - np.sqrt(
        2.0 * math.pi * system.work_of_adhesion * a / k)
    return float(out) if np.ndim(contact_radius) == 0 else out


def jkr_load_sweep(system, forces):
    """Contact radius and displacement over an array of loads.

    Convenience for reports: returns (a, delta) arrays for loads that must
    all lie at or above pull-off.
    """
    a = jkr_contact_radius(system, forces)
    delta = jkr_central_displacement(system, a)
    return a, delta
