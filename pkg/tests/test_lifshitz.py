"""Matsubara sum, wavevector integrals and reflection amplitudes.

The frozen integrand values below were produced by an independent QUADPACK
evaluation of the same layered-reflection integrand (raw p axis, adaptive
subdivision, epsrel 1e-11), so agreement is a genuine cross-check of the
panel quadrature and not a regression snapshot.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimirlab.dielectric import Constant, Drude, Plasma
from casimirlab.errors import AccuracyError, DomainError
from casimirlab.geometry import ideal_energy_per_area
from casimirlab.lifshitz import (LayerStack, MatsubaraContext,
                                 _zero_frequency_term, composite_delta_31,
                                 energy_curve, free_energy_per_area,
                                 free_energy_with_stats, fresnel_deltas,
                                 integrand_I, normalized_force_curve)

ZETA3 = 1.202056903160


def test_matsubara_scale():
    ctx = MatsubaraContext(temperature=298.0)
    assert ctx.xi(1) == pytest.approx(2.451338e14, rel=1e-6)
    assert ctx.xi(10) == pytest.approx(10 * ctx.xi(1), rel=1e-15)
    with pytest.raises(DomainError):
        ctx.xi(-1)


def test_context_validation():
    with pytest.raises(DomainError):
        MatsubaraContext(temperature=0.0)
    with pytest.raises(DomainError):
        MatsubaraContext(temperature=298.0, term_budget=4)
    with pytest.raises(DomainError):
        MatsubaraContext(temperature=298.0, quad_rel_tol=2.0)
    with pytest.raises(DomainError):
        LayerStack(metal=Drude(1.4e16, 5.3e13), coating=Constant(2.0))


@settings(max_examples=150, deadline=None)
@given(eps_i=st.floats(1.0, 1e9), eps_j=st.floats(1.0, 1e9),
       p=st.floats(1.0, 1e4))
def test_fresnel_amplitudes_bounded(eps_i, eps_j, p):
    dbar, d = fresnel_deltas(eps_i, eps_j, p)
    assert abs(dbar) <= 1.0 + 1e-12
    assert abs(d) <= 1.0 + 1e-12


def test_fresnel_identical_media_reflect_nothing():
    dbar, d = fresnel_deltas(7.3, 7.3, 2.0)
    assert dbar == 0.0 and d == 0.0


def test_integrand_frozen_values(coated_drude_stack, room_ctx):
    # independently computed fixtures for the coated gold stack
    cases = [
        (1e15, 50e-9, -1.1586831119),
        (room_ctx.xi(1), 20e-9, -1.0877470597),
        (3e15, 100e-9, -3.0627062865e-1),
    ]
    for xi, d, expected in cases:
        got = integrand_I(coated_drude_stack, xi, d)
        print(f"I({xi:.3e}, {d * 1e9:.0f} nm) = {got:.10e} (expect {expected:.10e})")
        assert got == pytest.approx(expected, rel=3e-5)


def test_integrand_frozen_values_mirror_limit():
    stack = LayerStack(metal=Constant(1e8))
    assert integrand_I(stack, 1e15, 50e-9) == pytest.approx(-2.2112213338, rel=3e-5)
    assert integrand_I(stack, 1.5e15, 100e-9) == pytest.approx(-1.5898622045, rel=3e-5)


def test_integrand_scaling_for_dispersionless_media():
    # without dispersion the integral depends on xi and d only through their
    # product, so trading one for the other must not change it
    stack = LayerStack(metal=Constant(100.0))
    a = integrand_I(stack, 1e15, 50e-9)
    b = integrand_I(stack, 0.5e15, 100e-9)
    assert a == pytest.approx(b, rel=3e-5)
    assert a < 0


def test_integrand_domain_guards(coated_drude_stack):
    with pytest.raises(DomainError):
        integrand_I(coated_drude_stack, 0.0, 50e-9)
    with pytest.raises(DomainError):
        integrand_I(coated_drude_stack, 1e15, -1e-9)
    with pytest.raises(DomainError):
        composite_delta_31(coated_drude_stack, 0.0, np.array([1.5]))


def test_gap_matching_coating_shifts_separation(bare_drude_stack):
    # a coating indistinguishable from the gap is just more gap: with both
    # bodies carrying thickness a, the coated integrand at separation d must
    # reproduce the bare one at d + 2a after the 1/d^2 prefactor is undone
    a = 2e-9
    coated = LayerStack(metal=Drude(1.4e16, 5.3e13), coating=Constant(1.0),
                        thickness=a)
    for xi, d in ((1e15, 50e-9), (4e15, 120e-9)):
        lhs = integrand_I(coated, xi, d) * (d + 2 * a) ** 2 / d**2
        rhs = integrand_I(bare_drude_stack, xi, d + 2 * a)
        assert lhs == pytest.approx(rhs, rel=3e-5)


def test_zero_term_static_dielectric(room_ctx):
    # for a constant eps the xi -> 0 limit is pure TM with the static
    # amplitude r = (eps-1)/(eps+1): integral x ln(1 - r^2 e^-x) = -Li3(r^2)
    stack = LayerStack(metal=Constant(2.25))
    zero = _zero_frequency_term(stack, 50e-9, room_ctx)
    assert zero == pytest.approx(-1.5079236364e-1, rel=1e-4)


def test_zero_term_te_mode_survival(room_ctx):
    # the difference between a relaxing conductor and a lossless plasma sits
    # entirely in the zero-frequency TE mode: the conductor keeps only the TM
    # half (-zeta(3)), the plasma keeps both (-2 zeta(3) for omega_p d/c >> 1)
    d = 100e-9
    zero_drude = _zero_frequency_term(
        LayerStack(metal=Drude(1.4e16, 5.3e13)), d, room_ctx)
    zero_plasma = _zero_frequency_term(
        LayerStack(metal=Plasma(omega_p=2.451338e18)), d, room_ctx)
    zero_mirror = _zero_frequency_term(
        LayerStack(metal=Constant(1e8)), d, room_ctx)
    print(f"zero terms: drude {zero_drude:.6f}, const {zero_mirror:.6f}, "
          f"plasma {zero_plasma:.6f}")
    assert zero_drude == pytest.approx(-ZETA3, rel=2e-3)
    assert zero_mirror == pytest.approx(-ZETA3, rel=2e-3)
    assert zero_plasma == pytest.approx(-2 * ZETA3, rel=2e-2)


def test_free_energy_sign_trend_and_stats(coated_drude_stack, room_ctx):
    e50, stats = free_energy_with_stats(coated_drude_stack, 50e-9, room_ctx)
    e100 = free_energy_per_area(coated_drude_stack, 100e-9, room_ctx)
    assert e50 < e100 < 0
    assert stats["terms_used"] >= 16
    assert stats["zero_term"] < 0
    assert stats["last_rel_change"] < room_ctx.convergence_rel_tol
    # a real conductor binds less than the perfect mirror
    assert abs(e100) < abs(ideal_energy_per_area(100e-9))


def test_term_budget_exhaustion(coated_drude_stack):
    ctx = MatsubaraContext(temperature=298.0, term_budget=8,
                           convergence_rel_tol=1e-12)
    with pytest.raises(AccuracyError):
        free_energy_with_stats(coated_drude_stack, 50e-9, ctx)


def test_energy_curve_container(bare_drude_stack, room_ctx):
    seps = np.array([40e-9, 80e-9])
    curve = energy_curve(bare_drude_stack, seps, room_ctx)
    assert curve.temperature == 298.0
    assert np.all(curve.energy_per_area < 0)
    assert curve.stack_label == bare_drude_stack.label()


def test_force_curve_radius_guard(bare_drude_stack, room_ctx):
    with pytest.raises(DomainError):
        normalized_force_curve(bare_drude_stack, np.array([1e-7]), 5e-6, room_ctx)
