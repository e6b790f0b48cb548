"""JKR contact mechanics and the Tabor-parameter regime selection."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from casimirlab.contact import (ContactSystem, Material,
                                jkr_central_displacement, jkr_contact_radius,
                                jkr_load_sweep, pull_off_force, select_model,
                                tabor_parameter)
from casimirlab.errors import DomainError, NoContactError

# polystyrene sphere (200 um) on a fused-silica flat, the reference system
PS_SILICA = ContactSystem(
    sphere=Material(youngs_modulus=3e9, poisson_ratio=0.33),
    flat=Material(youngs_modulus=8e10, poisson_ratio=0.42),
    radius=200e-6, work_of_adhesion=0.05, equilibrium_distance=3e-10)


def test_combined_stiffness():
    # K = [ (1-nu1^2)/E1 + (1-nu2^2)/E2 ]^-1, dominated by the soft sphere
    assert PS_SILICA.stiffness() == pytest.approx(3.253849e9, rel=1e-6)


def test_tabor_parameter_and_regime():
    mu = tabor_parameter(PS_SILICA)
    print(f"Tabor mu = {mu:.4f}")
    assert mu == pytest.approx(12.0486, rel=1e-4)
    assert select_model(mu) == "jkr"


def test_regime_boundaries():
    assert select_model(0.05) == "dmt"
    assert select_model(0.1) == "transition"   # boundary values are not DMT
    assert select_model(5.0) == "transition"
    assert select_model(6.0) == "jkr"
    with pytest.raises(DomainError):
        select_model(0.0)


def test_pull_off_force_exact():
    expected = -1.5 * math.pi * 0.05 * 200e-6
    assert pull_off_force(PS_SILICA) == expected


def test_zero_load_contact():
    a0 = jkr_contact_radius(PS_SILICA, 0.0)
    # at F = 0 the cubic collapses to a0^3 = 6 pi gamma R^2 / K
    direct = (6 * math.pi * 0.05 * PS_SILICA.radius**2
              / PS_SILICA.stiffness()) ** (1 / 3)
    assert a0 == pytest.approx(direct, rel=1e-12)
    assert a0 == pytest.approx(2.26279e-6, rel=1e-5)

    delta0 = jkr_central_displacement(PS_SILICA, a0)
    print(f"a0 = {a0 * 1e6:.5f} um, delta0 = {delta0 * 1e9:.5f} nm")
    assert delta0 == pytest.approx(10.82031e-9, rel=1e-5)


def test_zero_load_against_inverse_relation():
    # independent root: F(a) = K a^3 / R - sqrt(6 pi gamma K a^3) must vanish
    # at the same contact radius the closed-form branch returns
    k, r, g = PS_SILICA.stiffness(), PS_SILICA.radius, PS_SILICA.work_of_adhesion
    a_root = brentq(lambda a: k * a**3 / r - math.sqrt(6 * math.pi * g * k * a**3),
                    1e-9, 1e-3, xtol=1e-18, rtol=1e-15)
    assert jkr_contact_radius(PS_SILICA, 0.0) == pytest.approx(a_root, rel=1e-12)


def test_below_pull_off_raises():
    with pytest.raises(NoContactError):
        jkr_contact_radius(PS_SILICA, 1.01 * pull_off_force(PS_SILICA))


def test_load_sweep_monotone():
    loads = np.linspace(pull_off_force(PS_SILICA), 1e-3, 50)
    radii, displacements = jkr_load_sweep(PS_SILICA, loads)
    assert radii.shape == loads.shape
    assert np.all(np.diff(radii) > 0)  # contact grows with load
    # near pull-off the centre sits above the undeformed plane (adhesive neck)
    assert displacements[0] < 0 < displacements[-1]


def test_stiffer_pair_reference():
    # metal-on-metal pairing for contrast: much stiffer, smaller mu
    gold = Material(youngs_modulus=7.8e10, poisson_ratio=0.42)
    system = ContactSystem(sphere=gold, flat=gold, radius=1e-2,
                           work_of_adhesion=0.05)
    assert system.stiffness() == pytest.approx(4.735308e10, rel=1e-6)
    assert tabor_parameter(system) == pytest.approx(7.4466, rel=1e-4)


def test_material_validation():
    with pytest.raises(DomainError):
        Material(youngs_modulus=0.0, poisson_ratio=0.3)
    with pytest.raises(DomainError):
        Material(youngs_modulus=1e9, poisson_ratio=0.5)
    with pytest.raises(DomainError):
        ContactSystem(sphere=Material(1e9, 0.3), flat=Material(1e9, 0.3),
                      radius=1e-3, work_of_adhesion=-0.1)
