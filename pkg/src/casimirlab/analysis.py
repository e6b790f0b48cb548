"""Measurement-side analysis: averaging, fitting, error budgets, synthesis.

Everything here works on ForceCurve objects in SI units (separations in m,
normalized force F / (2 pi R) in N/m). The fit follows the reduction used on
real sphere-plate data: the recorded separation overstates the true one by an
offset delta fixed at contact, and a residual electrostatic term alpha / d
rides on top of the dispersion force, so the model compared against point i is

    F_model(d_i - delta) + alpha / (d_i - delta)^exponent.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize, minimize_scalar

from .curves import DEFAULT_NOISE_FLOOR, ErrorProfile, ForceCurve
from .errors import (DataQualityError, DomainError, FitError, UsageError,
                     ValidityError)

DELTA_SPAN = (-5e-9, 30e-9)     # m, separation-offset search window
ALPHA_SPAN = (-1e-22, 1e-22)    # N m, residual-electrostatic search window


# ---------------------------------------------------------------------------
# model interpolation

class _ModelInterpolator:
    """Smooth interpolant of a purely attractive model curve.

    Interpolates log(-F) against log(d), which is nearly polynomial for a
    power-law-like force and keeps the sign and decay exact; the derivative
    comes from the same spline.
    """

    def __init__(self, curve):
        c = curve.sorted()
        d = c.separations
        f = c.normalized_force
        if np.any(f >= 0):
            raise DataQualityError("model curve must be strictly attractive (F < 0)")
        if np.any(np.diff(d) <= 0):
            raise DataQualityError("model curve has duplicate separations")
        if d.size < 4:
            raise DataQualityError("model curve needs at least 4 points")
        self.d_min = float(d[0])
        self.d_max = float(d[-1])
        self._spline = CubicSpline(np.log(d), np.log(-f))

    def _check(self, d):
        if np.any(d < self.d_min * (1 - 1e-12)) or np.any(d > self.d_max * (1 + 1e-12)):
            raise FitError(
                f"model curve covers [{self.d_min:.3e}, {self.d_max:.3e}] m, "
                f"asked for [{np.min(d):.3e}, {np.max(d):.3e}] m")

    def force(self, d):
        d = np.asarray(d, dtype=float)
        self._check(d)
        return -np.exp(self._spline(np.log(d)))

    def gradient(self, d):
        """dF/dd; positive for an attractive force weakening with distance."""
        d = np.asarray(d, dtype=float)
        self._check(d)
        lnd = np.log(d)
        return -np.exp(self._spline(lnd)) * self._spline(lnd, 1) / d


# ---------------------------------------------------------------------------
# averaging repeated approaches

def average_curves(curves, window=None):
    """Combine repeated approach curves into one smoothed curve.

    All points are pooled and sorted by separation, then a centered running
    mean over `window` points (default 5 per contributing curve) is taken in
    both coordinates; pooled points sharing a separation are merged first.
    Averaging n curves with this window cuts uncorrelated noise by roughly
    sqrt(window).

    Parameters
    ----------
    curves : sequence of ForceCurve
        At least one; radii and temperatures must agree.
    window : int, optional
        Running-mean length in points.

    Returns
    -------
    ForceCurve
    """
    curves = list(curves)
    if not curves:
        raise UsageError("need at least one curve to average")
    r0, t0 = curves[0].radius, curves[0].temperature
    for c in curves[1:]:
        if abs(c.radius - r0) > 1e-9 * r0:
            raise DataQualityError("cannot average curves with different radii")
        if abs(c.temperature - t0) > 1e-6 * t0:
            raise DataQualityError("cannot average curves at different temperatures")
    if window is None:
        window = 5 * len(curves)
    if window < 1:
        raise DomainError("window must be >= 1")

    sep = np.concatenate([c.separations for c in curves])
    force = np.concatenate([c.normalized_force for c in curves])
    order = np.argsort(sep, kind="stable")
    sep, force = sep[order], force[order]

    # merge exact duplicates so the running mean sees one point per separation
    uniq, inverse, counts = np.unique(sep, return_inverse=True, return_counts=True)
    if uniq.size != sep.size:
        force = np.bincount(inverse, weights=force) / counts
        sep = uniq

    n = sep.size
    window = min(window, n)
    if window > 1:
        # centered mean with shrinking edges, via cumulative sums
        csum_f = np.concatenate([[0.0], np.cumsum(force)])
        csum_d = np.concatenate([[0.0], np.cumsum(sep)])
        half = window // 2
        lo = np.maximum(np.arange(n) - half, 0)
        hi = np.minimum(np.arange(n) + (window - half), n)
        force = (csum_f[hi] - csum_f[lo]) / (hi - lo)
        sep = (csum_d[hi] - csum_d[lo]) / (hi - lo)
        sep, keep = np.unique(sep, return_index=True)
        force = force[keep]

    meta = {"averaged_curves": len(curves), "window": int(window)}
    return ForceCurve(separations=sep, normalized_force=force, radius=r0,
                      temperature=t0, noise_floor=curves[0].noise_floor,
                      metadata=meta)


# ---------------------------------------------------------------------------
# electrostatic residual and fitting

def electrostatic_term(separations, alpha, exponent=1):
    """Residual electrostatic force alpha / d^exponent, N/m.

    alpha carries whatever power of metres makes the result N/m; a patch
    potential difference of a few mV gives alpha of order 1e-13 N m at
    exponent 1.
    """
    if exponent not in (1, 2):
        raise DomainError("electrostatic exponent must be 1 or 2")
    d = np.asarray(separations, dtype=float)
    if np.any(d <= 0):
        raise DomainError("separations must be positive")
    out = alpha / d**exponent
    return float(out) if np.ndim(separations) == 0 else out


@dataclass(frozen=True)
class FitResult:
    """Outcome of a two-parameter (offset, electrostatic) fit."""

    delta: float           # m, recorded minus true separation
    alpha: float           # electrostatic coefficient
    objective: float       # sum of squared residuals, (N/m)^2
    rms_relative: float    # rms residual / max |F_exp| inside the fit range
    fit_range: tuple       # (lower, upper) recorded separations, m
    n_points: int


def _profiled_alpha(f_exp, f_model, basis, alpha_span):
    """Least-squares alpha for fixed delta, clamped to the search span."""
    denom = float(np.dot(basis, basis))
    if denom == 0:
        return 0.0
    alpha = float(np.dot(basis, f_exp - f_model)) / denom
    return min(max(alpha, alpha_span[0]), alpha_span[1])


def fit_curve(experimental, model, fit_range, delta_span=DELTA_SPAN,
              alpha_span=ALPHA_SPAN, exponent=1):
    """Fit separation offset and electrostatic residual to a measured curve.

    Minimizes sum_i [F_i - F_model(d_i - delta) - alpha (d_i - delta)^-q]^2
    over the points whose recorded separation lies inside fit_range. alpha is
    profiled exactly for each trial delta (linear subproblem), delta is
    bracketed by a bounded scalar search and then polished by Gauss-Newton
    with the spline gradient, so a noiseless synthetic curve is recovered to
    numerical precision.

    Parameters
    ----------
    experimental : ForceCurve
    model : ForceCurve or _ModelInterpolator
        Dense attractive model curve; must cover the shifted separations for
        every delta in delta_span.
    fit_range : tuple
        (lower, upper) in m, applied to recorded separations.
    delta_span, alpha_span : tuple
        Search boxes for the two parameters.
    exponent : int
        Power of the electrostatic term, 1 or 2.

    Returns
    -------
    FitResult

    Raises
    ------
    FitError
        Too few points, no overlap with the model curve, or a degenerate span.
    """
    interp = model if isinstance(model, _ModelInterpolator) else _ModelInterpolator(model)
    if exponent not in (1, 2):
        raise DomainError("electrostatic exponent must be 1 or 2")
    lo, hi = fit_range
    if not lo < hi:
        raise FitError(f"empty fit range ({lo:.3e}, {hi:.3e})")
    if not (delta_span[0] < delta_span[1] and alpha_span[0] <= alpha_span[1]):
        raise FitError("degenerate parameter span")

    exp_sorted = experimental.sorted()
    mask = (exp_sorted.separations >= lo) & (exp_sorted.separations <= hi)
    d = exp_sorted.separations[mask]
    f_exp = exp_sorted.normalized_force[mask]
    if d.size < 4:
        raise FitError(f"only {d.size} points inside the fit range; need >= 4")

    # shrink the delta window to offsets the model curve can actually serve
    d_lo = max(delta_span[0], float(d[-1]) - interp.d_max)
    d_hi = min(delta_span[1], float(d[0]) - interp.d_min)
    if not d_lo < d_hi:
        raise FitError(
            "model curve does not cover the shifted fit range for any "
            f"delta in [{delta_span[0]:.3e}, {delta_span[1]:.3e}] m")

    def objective(delta):
        s = d - delta
        f_model = interp.force(s)
        basis = s**-float(exponent)
        alpha = _profiled_alpha(f_exp, f_model, basis, alpha_span)
        resid = f_exp - f_model - alpha * basis
        return float(np.dot(resid, resid)), alpha

    res = minimize_scalar(lambda x: objective(x)[0], bounds=(d_lo, d_hi),
                          method="bounded", options={"xatol": 1e-13})
    delta = float(res.x)
    best_obj, alpha = objective(delta)

    # Gauss-Newton polish on delta with alpha reprofiled each step: the
    # scalar search leaves delta at its xatol, which still leaks into alpha
    for _ in range(40):
        s = d - delta
        f_model = interp.force(s)
        basis = s**-float(exponent)
        alpha = _profiled_alpha(f_exp, f_model, basis, alpha_span)
        resid = f_exp - f_model - alpha * basis
        jac = interp.gradient(s) + alpha * exponent * s**-(exponent + 1.0)
        jj = float(np.dot(jac, jac))
        if jj == 0:
            break
        step = float(np.dot(jac, resid)) / jj
        new_delta = min(max(delta + step, d_lo), d_hi)
        new_obj, _ = objective(new_delta)
        if new_obj <= best_obj:
            moved = abs(new_delta - delta)
            delta, best_obj = new_delta, new_obj
            if moved < 1e-22:
                break
        else:
            break
    best_obj, alpha = objective(delta)

    # simplex fallback for the rare case the smooth path stalled on a bound
    if not (d_lo < delta < d_hi):
        def joint(x):
            s = d - x[0]
            if np.any(s <= 0) or x[0] <= d_lo or x[0] >= d_hi:
                return np.inf
            resid = f_exp - interp.force(s) - x[1] * s**-float(exponent)
            return float(np.dot(resid, resid))

        nm = minimize(joint, [min(max(delta, d_lo + 1e-12), d_hi - 1e-12), alpha],
                      method="Nelder-Mead",
                      options={"xatol": 1e-15, "fatol": 1e-30, "maxiter": 2000})
        if nm.fun < best_obj:
            delta, alpha, best_obj = float(nm.x[0]), float(nm.x[1]), float(nm.fun)

    scale = float(np.max(np.abs(f_exp)))
    rms = math.sqrt(best_obj / d.size)
    return FitResult(delta=delta, alpha=alpha, objective=best_obj,
                     rms_relative=rms / scale if scale > 0 else math.inf,
                     fit_range=(float(lo), float(hi)), n_points=int(d.size))


def rms_at_offset(experimental, model, fit_range, delta, alpha=0.0, exponent=1):
    """Relative rms residual at a fixed offset, without fitting anything.

    Evaluates the fit_curve objective at the given (delta, alpha) and returns
    rms / max |F_exp| inside the range, the FitResult.rms_relative convention.
    Useful for judging how much a proposed shift of the separation axis costs.
    """
    interp = model if isinstance(model, _ModelInterpolator) else _ModelInterpolator(model)
    if exponent not in (1, 2):
        raise DomainError("electrostatic exponent must be 1 or 2")
    lo, hi = fit_range
    exp_sorted = experimental.sorted()
    mask = (exp_sorted.separations >= lo) & (exp_sorted.separations <= hi)
    d = exp_sorted.separations[mask]
    f_exp = exp_sorted.normalized_force[mask]
    if d.size == 0:
        raise UsageError(f"no points inside ({lo:.3e}, {hi:.3e}) m")
    s = d - delta
    if np.any(s <= 0):
        raise DomainError("offset pushes separations through zero")
    resid = f_exp - interp.force(s) - alpha * s**-float(exponent)
    scale = float(np.max(np.abs(f_exp)))
    rms = math.sqrt(float(np.dot(resid, resid)) / d.size)
    return rms / scale if scale > 0 else math.inf


# ---------------------------------------------------------------------------
# error accumulation and model discrimination

def rms_error_profile(experimental, model, lower, upper_bounds):
    """Accumulated rms deviation from a model as the range grows upward.

    For each upper bound u, takes the experimental points with recorded
    separation in [lower, u] and computes
    sqrt( sum (F_exp - F_model)^2 / N ); the relative column divides by the
    model magnitude at the lower bound, the largest force in the window.

    Parameters
    ----------
    experimental : ForceCurve
    model : ForceCurve or _ModelInterpolator
    lower : float
        Fixed lower edge of the accumulation window, m.
    upper_bounds : array
        Increasing upper edges, m, each > lower.

    Returns
    -------
    ErrorProfile
    """
    interp = model if isinstance(model, _ModelInterpolator) else _ModelInterpolator(model)
    ub = np.asarray(upper_bounds, dtype=float)
    if ub.size == 0:
        raise UsageError("need at least one upper bound")
    if np.any(ub <= lower):
        raise UsageError("every upper bound must exceed the lower bound")
    exp_sorted = experimental.sorted()
    d_all = exp_sorted.separations
    f_all = exp_sorted.normalized_force

    rms = np.empty(ub.size)
    for i, u in enumerate(ub):
        mask = (d_all >= lower) & (d_all <= u)
        if not np.any(mask):
            raise UsageError(
                f"no experimental points in [{lower:.3e}, {u:.3e}] m")
        resid = f_all[mask] - interp.force(d_all[mask])
        rms[i] = math.sqrt(float(np.dot(resid, resid)) / int(np.sum(mask)))
    ref = abs(interp.force(np.array([lower]))[0])
    return ErrorProfile(upper_bounds=ub, accumulated_rms=rms,
                        relative_to_shortest=rms / ref)


@dataclass(frozen=True)
class DiscriminationRecord:
    """How far an alternative model strays from the reference prediction."""

    label: str
    max_rel_difference: float      # max |F_alt - F_ref| / |F_ref|
    separation_at_max: float       # m
    max_abs_difference: float      # N/m
    exceeds_noise_floor: bool


def model_discrimination_study(reference, alternatives, noise_floor=DEFAULT_NOISE_FLOOR):
    """Compare alternative model curves against a reference prediction.

    Each alternative is interpolated onto the reference separations where the
    two overlap; the record reports the largest relative and absolute
    deviation and whether the absolute deviation clears the given noise
    floor, i.e. whether a measurement at that floor could tell the models
    apart.

    Parameters
    ----------
    reference : ForceCurve
    alternatives : dict
        label -> ForceCurve.
    noise_floor : float
        Instrument resolution in N/m.

    Returns
    -------
    list of DiscriminationRecord, in the input order.
    """
    ref_sorted = reference.sorted()
    d_ref = ref_sorted.separations
    f_ref = ref_sorted.normalized_force
    records = []
    for label, curve in alternatives.items():
        interp = _ModelInterpolator(curve)
        mask = (d_ref >= interp.d_min) & (d_ref <= interp.d_max)
        if not np.any(mask):
            raise DataQualityError(
                f"model '{label}' does not overlap the reference separations")
        diff = np.abs(interp.force(d_ref[mask]) - f_ref[mask])
        rel = diff / np.abs(f_ref[mask])
        i = int(np.argmax(rel))
        records.append(DiscriminationRecord(
            label=label,
            max_rel_difference=float(rel[i]),
            separation_at_max=float(d_ref[mask][i]),
            max_abs_difference=float(np.max(diff)),
            exceeds_noise_floor=bool(np.max(diff) > noise_floor)))
    return records


# ---------------------------------------------------------------------------
# synthetic measurements

def synthesize_measurement(model, spring_constant, start_separation,
                           end_separation, approach_rate=80e-9,
                           sample_rate_hz=400.0, noise=DEFAULT_NOISE_FLOOR,
                           seed=0, delta=0.0, alpha=0.0, exponent=1):
    """Generate one synthetic approach curve from a model prediction.

    Separations are sampled from start_separation downward at
    approach_rate / sample_rate_hz per point, the model force (plus an
    optional electrostatic residual) is evaluated at the true separation
    d - delta, zero-mean Gaussian noise of rms `noise` is added, and the
    recorded curve stops at the cantilever jump-in: walking inward, the first
    sample where the force gradient reaches the spring constant,
    2 pi R dF/dd >= k, is unstable and is excluded along with everything
    closer.

    Parameters
    ----------
    model : ForceCurve or _ModelInterpolator
        Dense attractive model of F / (2 pi R); its radius sets the probe.
    spring_constant : float
        Cantilever stiffness, N/m.
    start_separation, end_separation : float
        Recorded-separation range walked inward, m.
    approach_rate, sample_rate_hz : float
        Together fix the separation step.
    noise : float
        Gaussian rms added to the normalized force, N/m.
    seed : int
        Feeds numpy's default_rng; identical seeds give identical curves.
    delta, alpha, exponent :
        Offset between recorded and true separation, and the electrostatic
        residual injected into the signal.

    Returns
    -------
    ForceCurve
        Descending separations, metadata holding the generator parameters and
        the jump-in separation (None if the whole sweep is stable).
    """
    if isinstance(model, _ModelInterpolator):
        interp, radius, temperature = model, None, 298.0
    else:
        interp, radius, temperature = _ModelInterpolator(model), model.radius, model.temperature
    if radius is None:
        raise DomainError("synthesize_measurement needs a ForceCurve with a radius")
    if spring_constant <= 0:
        raise DomainError("spring constant must be positive")
    if approach_rate <= 0 or sample_rate_hz <= 0:
        raise DomainError("approach rate and sample rate must be positive")
    if noise < 0:
        raise DomainError("noise rms must be >= 0")
    if not end_separation < start_separation:
        raise DomainError("start separation must exceed end separation")

    step = approach_rate / sample_rate_hz
    n = int(math.floor((start_separation - end_separation) / step)) + 1
    recorded = start_separation - step * np.arange(n)
    true_sep = recorded - delta
    if np.any(true_sep <= 0):
        raise DomainError("delta pushes true separations through zero")

    grad = 2.0 * math.pi * radius * interp.gradient(true_sep)
    unstable = grad >= spring_constant
    jump_in = None
    if unstable.any():
        first = int(np.argmax(unstable))  # separations descend, so first hit
        if first == 0:
            raise ValidityError(
                "cantilever is unstable over the whole sweep; stiffen the "
                "spring or start farther out")
        jump_in = float(recorded[first])
        recorded = recorded[:first]
        true_sep = true_sep[:first]

    force = interp.force(true_sep)
    if alpha != 0.0:
        force = force + electrostatic_term(true_sep, alpha, exponent)
    rng = np.random.default_rng(seed)
    if noise > 0:
        force = force + rng.normal(0.0, noise, size=force.size)

    meta = {"spring_constant": spring_constant, "approach_rate": approach_rate,
            "sample_rate_hz": sample_rate_hz, "noise_rms": noise, "seed": seed,
            "delta": delta, "alpha": alpha, "exponent": exponent,
            "jump_in_separation": jump_in}
    return ForceCurve(separations=recorded, normalized_force=force,
                      radius=radius, temperature=temperature,
                      noise_floor=noise if noise > 0 else DEFAULT_NOISE_FLOOR,
                      metadata=meta)
