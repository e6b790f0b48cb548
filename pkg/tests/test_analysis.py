"""Curve averaging, offset/electrostatic fitting and synthetic sweeps.

Power-law curves are the workhorse here: the model interpolant works on
log(-F) vs log(d), which represents -C/d^q exactly, so offsets, gradients and
jump thresholds all have closed forms to test against.
"""

import math

import numpy as np
import pytest

from casimirlab.analysis import (_ModelInterpolator, average_curves,
                                 electrostatic_term, fit_curve,
                                 model_discrimination_study, rms_at_offset,
                                 rms_error_profile, synthesize_measurement)
from casimirlab.curves import ForceCurve
from casimirlab.errors import (DataQualityError, DomainError, UsageError,
                               ValidityError)

# normalized perfect-mirror coefficient: F / (2 pi R) = -C / d^3 with
# C = pi^2 hbar c / 720, about -0.433 uN/m at 100 nm
C_MIRROR = 4.333753e-28


def _offset_data(factory, delta, alpha, exponent=1, lo=30e-9, hi=150e-9,
                 points=40):
    """Noiseless measurement with known offset and electrostatic residual."""
    true = np.linspace(lo, hi, points)
    f = -C_MIRROR / true**3
    if alpha:
        f = f + electrostatic_term(true, alpha, exponent)
    data = ForceCurve(separations=true + delta, normalized_force=f, radius=1e-2)
    return data, factory(C_MIRROR)


# ---------------------------------------------------------------------------
# model interpolant

def test_interpolator_exact_on_power_law(power_law):
    interp = _ModelInterpolator(power_law(C_MIRROR))
    d = np.array([7.3e-9, 52.1e-9, 333.3e-9])
    assert interp.force(d) == pytest.approx(-C_MIRROR / d**3, rel=1e-10)
    # dF/dd = 3 C / d^4 (force becomes less negative as d grows)
    assert interp.gradient(d) == pytest.approx(3 * C_MIRROR / d**4, rel=1e-8)


def test_interpolator_input_guards(power_law):
    good = power_law(C_MIRROR)
    with pytest.raises(DataQualityError):
        _ModelInterpolator(ForceCurve(separations=good.separations,
                                      normalized_force=-good.normalized_force,
                                      radius=1e-2))
    short = ForceCurve(separations=np.array([1e-8, 2e-8, 3e-8]),
                       normalized_force=np.array([-3.0, -2.0, -1.0]),
                       radius=1e-2)
    with pytest.raises(DataQualityError):
        _ModelInterpolator(short)
    dup = ForceCurve(separations=np.array([1e-8, 2e-8, 2e-8, 3e-8, 4e-8]),
                     normalized_force=-np.ones(5), radius=1e-2)
    with pytest.raises(DataQualityError):
        _ModelInterpolator(dup)


# ---------------------------------------------------------------------------
# electrostatic residual

def test_electrostatic_term_values():
    assert electrostatic_term(50e-9, 5e-23, 1) == pytest.approx(1e-15, rel=1e-12)
    assert electrostatic_term(50e-9, 5e-23, 2) == pytest.approx(2e-8, rel=1e-12)
    with pytest.raises(DomainError):
        electrostatic_term(50e-9, 1e-23, 3)
    with pytest.raises(DomainError):
        electrostatic_term(-50e-9, 1e-23, 1)


# ---------------------------------------------------------------------------
# fitting

def test_fit_recovers_noiseless_offset(power_law):
    data, model = _offset_data(power_law, delta=9e-9, alpha=3e-14)
    result = fit_curve(data, model, fit_range=(40e-9, 155e-9),
                       alpha_span=(-1e-13, 1e-13))
    print(f"noiseless fit: delta = {result.delta * 1e9:.6f} nm, "
          f"alpha = {result.alpha:.6e}")
    assert result.delta == pytest.approx(9e-9, abs=1e-11)
    assert result.alpha == pytest.approx(3e-14, rel=1e-3)
    assert result.rms_relative < 1e-6
    assert result.n_points > 20


def test_fit_of_exact_data_is_trivial(power_law):
    # with nothing to absorb, alpha is pinned only to its (deliberately
    # narrow) default window: the interpolation noise floor sits above the
    # window width, so all that can be promised is that the offset vanishes
    # and the electrostatic term stays physically irrelevant
    data, model = _offset_data(power_law, delta=0.0, alpha=0.0)
    result = fit_curve(data, model, fit_range=(35e-9, 145e-9))
    assert abs(result.delta) < 1e-12
    assert abs(result.alpha) <= 1e-22 * (1 + 1e-12)
    assert abs(result.alpha) / 35e-9 < 1e-4 * C_MIRROR / (145e-9) ** 3
    assert result.rms_relative < 1e-6


def test_fit_roundtrip_grid(power_law):
    # every (offset, residual) pair inside the search windows comes back
    for delta in (0.0, 10e-9, 20e-9):
        for alpha in (0.0, 2e-14, 2e-13):
            data, model = _offset_data(power_law, delta, alpha)
            result = fit_curve(data, model,
                               fit_range=(30e-9 + delta, 150e-9 + delta),
                               alpha_span=(-1e-12, 1e-12))
            assert result.delta == pytest.approx(delta, abs=5e-11), (delta, alpha)
            assert result.alpha == pytest.approx(alpha, rel=1e-3, abs=1e-17), \
                (delta, alpha)


def test_fit_is_order_independent(power_law):
    data, model = _offset_data(power_law, delta=12e-9, alpha=5e-24)
    rng = np.random.default_rng(3)
    perm = rng.permutation(data.separations.size)
    shuffled = ForceCurve(separations=data.separations[perm],
                          normalized_force=data.normalized_force[perm],
                          radius=data.radius)
    a = fit_curve(data, model, fit_range=(45e-9, 160e-9))
    b = fit_curve(shuffled, model, fit_range=(45e-9, 160e-9))
    assert b.delta == pytest.approx(a.delta, rel=1e-9, abs=1e-15)
    assert b.alpha == pytest.approx(a.alpha, rel=1e-9, abs=1e-28)
    assert b.n_points == a.n_points


def test_fit_exponent_two_path(power_law):
    data, model = _offset_data(power_law, delta=6e-9, alpha=3e-22, exponent=2)
    result = fit_curve(data, model, fit_range=(38e-9, 154e-9), exponent=2,
                       alpha_span=(-1e-21, 1e-21))
    assert result.delta == pytest.approx(6e-9, abs=1e-11)
    assert result.alpha == pytest.approx(3e-22, rel=1e-2)


def test_fit_usage_guards(power_law):
    data, model = _offset_data(power_law, delta=0.0, alpha=0.0)
    from casimirlab.errors import FitError
    with pytest.raises(FitError):
        fit_curve(data, model, fit_range=(150e-9, 40e-9))  # empty window
    with pytest.raises(FitError):
        fit_curve(data, model, fit_range=(1e-6, 2e-6))     # no data points
    three = ForceCurve(separations=data.separations[:3],
                       normalized_force=data.normalized_force[:3], radius=1e-2)
    with pytest.raises(FitError):
        fit_curve(three, model, fit_range=(20e-9, 200e-9))


def test_rms_at_offset_matches_fit_objective(power_law):
    model = power_law(C_MIRROR)
    data = synthesize_measurement(model, spring_constant=1e3,
                                  start_separation=150e-9,
                                  end_separation=40e-9, noise=1e-8, seed=11,
                                  delta=8e-9)
    result = fit_curve(data, model, fit_range=(50e-9, 150e-9))
    replay = rms_at_offset(data, model, (50e-9, 150e-9),
                           result.delta, result.alpha)
    assert replay == pytest.approx(result.rms_relative, rel=1e-12)
    # moving half a nanometre off the optimum must not improve the residual
    assert rms_at_offset(data, model, (50e-9, 150e-9),
                         result.delta + 0.5e-9, result.alpha) > replay
    with pytest.raises(UsageError):
        rms_at_offset(data, model, (1e-6, 2e-6), 0.0)
    with pytest.raises(DomainError):
        rms_at_offset(data, model, (50e-9, 150e-9), 60e-9)


# ---------------------------------------------------------------------------
# averaging

def test_average_requires_input():
    with pytest.raises(UsageError):
        average_curves([])


def test_average_single_curve_window_one_sorts(power_law):
    base = power_law(C_MIRROR, points=30)
    perm = np.random.default_rng(0).permutation(30)
    shuffled = ForceCurve(separations=base.separations[perm],
                          normalized_force=base.normalized_force[perm],
                          radius=base.radius)
    avg = average_curves([shuffled], window=1)
    assert np.array_equal(avg.separations, base.separations)
    assert np.array_equal(avg.normalized_force, base.normalized_force)
    assert avg.metadata["averaged_curves"] == 1


def test_average_reduces_noise_by_sqrt_n(power_law):
    base = power_law(C_MIRROR, d_lo=20e-9, d_hi=220e-9, points=200)
    rng = np.random.default_rng(42)
    sigma = 1e-7
    copies = [ForceCurve(separations=base.separations,
                         normalized_force=base.normalized_force
                         + rng.normal(0.0, sigma, base.separations.size),
                         radius=base.radius) for _ in range(5)]
    # identical grids, so window=1 keeps only the duplicate merge: a pure
    # five-way average whose residual rms should drop by sqrt(5)
    avg = average_curves(copies, window=1)
    assert avg.separations.size == 200
    resid = np.std(avg.normalized_force - base.normalized_force)
    print(f"averaged residual rms {resid:.3e} vs sigma/sqrt(5) = {sigma / math.sqrt(5):.3e}")
    assert 0.7 * sigma / math.sqrt(5) < resid < 1.3 * sigma / math.sqrt(5)


def test_average_output_monotone_with_default_window(power_law):
    base = power_law(C_MIRROR, points=80)
    rng = np.random.default_rng(7)
    curves = [ForceCurve(separations=base.separations * (1 + 1e-4 * k),
                         normalized_force=base.normalized_force
                         + rng.normal(0.0, 1e-8, 80),
                         radius=base.radius) for k in range(3)]
    avg = average_curves(curves)
    assert np.all(np.diff(avg.separations) > 0)
    assert avg.metadata["window"] == 15


def test_average_rejects_mismatched_probes(power_law):
    a = power_law(C_MIRROR)
    b = power_law(C_MIRROR, radius=2e-2)
    with pytest.raises(DataQualityError):
        average_curves([a, b])
    c = ForceCurve(separations=a.separations,
                   normalized_force=a.normalized_force, radius=a.radius,
                   temperature=350.0)
    with pytest.raises(DataQualityError):
        average_curves([a, c])


# ---------------------------------------------------------------------------
# error profile

def test_error_profile_of_exact_data_is_zero(power_law):
    model = power_law(C_MIRROR)
    data, _ = _offset_data(power_law, delta=0.0, alpha=0.0)
    profile = rms_error_profile(data, model, 30e-9,
                                np.array([60e-9, 100e-9, 150e-9]))
    assert np.all(profile.relative_to_shortest < 1e-12)
    assert np.array_equal(profile.upper_bounds, [60e-9, 100e-9, 150e-9])


def test_error_profile_scaled_data(power_law):
    # a 2 percent multiplicative error gives residuals proportional to |F|,
    # so widening the window only adds smaller residuals: the accumulated
    # relative rms must fall monotonically and stay below 2 percent
    model = power_law(C_MIRROR)
    true = np.linspace(30e-9, 200e-9, 120)
    data = ForceCurve(separations=true,
                      normalized_force=-1.02 * C_MIRROR / true**3, radius=1e-2)
    bounds = np.array([50e-9, 80e-9, 120e-9, 200e-9])
    profile = rms_error_profile(data, model, 30e-9, bounds)
    rel = profile.relative_to_shortest
    assert np.all(rel < 0.02)
    assert np.all(np.diff(rel) < 0)
    assert rel[0] > 0.01


def test_error_profile_usage_guards(power_law):
    model = power_law(C_MIRROR)
    data, _ = _offset_data(power_law, delta=0.0, alpha=0.0)
    with pytest.raises(UsageError):
        rms_error_profile(data, model, 30e-9, np.array([]))
    with pytest.raises(UsageError):
        rms_error_profile(data, model, 100e-9, np.array([60e-9]))
    with pytest.raises(UsageError):
        rms_error_profile(data, model, 0.9e-9, np.array([1e-9]))


# ---------------------------------------------------------------------------
# model discrimination

def test_discrimination_flat_ratio(power_law):
    ref = power_law(C_MIRROR)
    records = model_discrimination_study(
        ref, {"stronger": power_law(1.1 * C_MIRROR)}, noise_floor=1e-7)
    rec = records[0]
    assert rec.label == "stronger"
    assert rec.max_rel_difference == pytest.approx(0.1, rel=1e-6)
    # largest absolute gap sits at the closest approach
    d_min = ref.separations.min()
    assert rec.max_abs_difference == pytest.approx(0.1 * C_MIRROR / d_min**3,
                                                   rel=1e-6)
    assert rec.exceeds_noise_floor
    quiet = model_discrimination_study(
        ref, {"stronger": power_law(1.1 * C_MIRROR)}, noise_floor=1.0)
    assert not quiet[0].exceeds_noise_floor


def test_discrimination_requires_overlap(power_law):
    ref = power_law(C_MIRROR)
    far = power_law(C_MIRROR, d_lo=1e-6, d_hi=4e-6)
    with pytest.raises(DataQualityError):
        model_discrimination_study(ref, {"far": far})


# ---------------------------------------------------------------------------
# synthetic sweeps

def test_synthesis_is_deterministic(power_law):
    model = power_law(C_MIRROR)
    kwargs = dict(spring_constant=1e3, start_separation=150e-9,
                  end_separation=40e-9, noise=1e-7)
    a = synthesize_measurement(model, seed=5, **kwargs)
    b = synthesize_measurement(model, seed=5, **kwargs)
    c = synthesize_measurement(model, seed=6, **kwargs)
    assert np.array_equal(a.normalized_force, b.normalized_force)
    assert not np.array_equal(a.normalized_force, c.normalized_force)
    assert np.all(np.diff(a.separations) < 0)  # recorded walking inward


def test_synthesis_noiseless_reproduces_model(power_law):
    model = power_law(C_MIRROR)
    curve = synthesize_measurement(model, spring_constant=1e4,
                                   start_separation=150e-9,
                                   end_separation=40e-9, noise=0.0)
    assert curve.normalized_force == pytest.approx(
        -C_MIRROR / curve.separations**3, rel=1e-9)
    assert curve.metadata["jump_in_separation"] is None


def test_synthesis_jump_in_at_gradient_threshold(power_law):
    # for F = -C/d^3 the instability 2 pi R dF/dd >= k sits at
    # d* = (6 pi R C / k)^(1/4); with k = 6.3 N/m that is 60.006 nm, so the
    # first unstable sample on the 0.2 nm grid is exactly 60.0 nm
    radius, k = 1e-2, 6.3
    model = power_law(C_MIRROR, radius=radius)
    d_star = (6 * math.pi * radius * C_MIRROR / k) ** 0.25
    assert 60.0e-9 < d_star < 60.2e-9
    curve = synthesize_measurement(model, spring_constant=k,
                                   start_separation=150e-9,
                                   end_separation=20e-9, noise=0.0)
    assert curve.metadata["jump_in_separation"] == pytest.approx(60.0e-9, abs=1e-15)
    assert curve.separations.min() == pytest.approx(60.2e-9, abs=1e-15)


def test_synthesis_whole_sweep_unstable(power_law):
    model = power_law(C_MIRROR)
    with pytest.raises(ValidityError):
        synthesize_measurement(model, spring_constant=0.1,
                               start_separation=150e-9, end_separation=40e-9)


def test_synthesis_stable_sweep_keeps_every_sample(power_law):
    model = power_law(C_MIRROR)
    curve = synthesize_measurement(model, spring_constant=1e4,
                                   start_separation=150e-9,
                                   end_separation=20e-9)
    # step = 80 nm/s / 400 Hz = 0.2 nm -> 651 samples over 130 nm
    assert curve.separations.size == 651
    assert curve.metadata["spring_constant"] == 1e4


def test_synthesis_input_guards(power_law):
    model = power_law(C_MIRROR)
    with pytest.raises(DomainError):
        synthesize_measurement(model, spring_constant=-1.0,
                               start_separation=150e-9, end_separation=40e-9)
    with pytest.raises(DomainError):
        synthesize_measurement(model, spring_constant=1e3,
                               start_separation=40e-9, end_separation=150e-9)
    with pytest.raises(DomainError):
        synthesize_measurement(model, spring_constant=1e3,
                               start_separation=150e-9, end_separation=40e-9,
                               noise=-1e-9)
    with pytest.raises(DomainError):
        # offset larger than the closest approach: true separation <= 0
        synthesize_measurement(model, spring_constant=1e3,
                               start_separation=150e-9, end_separation=40e-9,
                               delta=45e-9)
    with pytest.raises(DomainError):
        synthesize_measurement(_ModelInterpolator(model), spring_constant=1e3,
                               start_separation=150e-9, end_separation=40e-9)
