"""Dielectric response on the imaginary frequency axis.

Builds eps(i xi) for every material involved in the force calculation, either
from closed-form models (Drude, plasma, single oscillator, Debye plus
oscillator sum for water) or from tabulated optical data (n, k) through the
Kramers-Kronig transform

    eps(i xi) = 1 + (2/pi) int x eps''(x) / (x^2 + xi^2) dx.

All frequencies are angular, rad/s. eV and nm exist only at the ingestion
boundary (see tableio).
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, E_CHARGE, EPS_0, HBAR, M_E
from .errors import AccuracyError, ConfigError, DataQualityError, DomainError

TWO_PI = 2.0 * math.pi

# default integration window of the KK transform, rad/s
KK_OMEGA_LO = 1e12
KK_OMEGA_HI = 1e21
KK_POINTS_PER_DECADE = 200

# eps(i xi) evaluation grid for tabulated materials, rad/s
GRID_XI_LO = 1e14
GRID_XI_HI = 1e19
GRID_POINTS_PER_DECADE = 40


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _scalar_or_array(arr, was_scalar):
    return float(arr) if was_scalar else arr


# ---------------------------------------------------------------------------
# closed-form pieces


def eps_imag_from_nk(n, k):
    """Imaginary part of the permittivity from optical constants: eps'' = 2 n k."""
    n_arr, n_scalar = _as_float_array(n)
    k_arr, k_scalar = _as_float_array(k)
    if np.any(n_arr < 0) or np.any(k_arr < 0):
        raise DomainError("refractive index and extinction coefficient must be >= 0")
    return _scalar_or_array(2.0 * n_arr * k_arr, n_scalar and k_scalar)


def drude_eps(xi, omega_p, gamma):
    """Drude permittivity on the imaginary axis, 1 + omega_p^2/(xi^2 + gamma xi).

    Diverges at xi = 0; that input is rejected rather than returning inf.
    """
    xi_arr, scalar = _as_float_array(xi)
    if np.any(xi_arr <= 0):
        raise DomainError("drude_eps requires xi > 0 (diverges at xi = 0)")
    return _scalar_or_array(1.0 + omega_p**2 / (xi_arr**2 + gamma * xi_arr), scalar)


def plasma_eps(xi, omega_p):
    """Plasma-model permittivity on the imaginary axis, 1 + omega_p^2/xi^2."""
    xi_arr, scalar = _as_float_array(xi)
    if np.any(xi_arr <= 0):
        raise DomainError("plasma_eps requires xi > 0 (diverges at xi = 0)")
    return _scalar_or_array(1.0 + omega_p**2 / xi_arr**2, scalar)


def oscillator_eps(xi, n_ref, omega_uv, exponent=1):
    """Single-oscillator permittivity 1 + (n_ref^2 - 1)/(1 + (xi/omega_uv)^q).

    The exponent q is configurable (1 or 2). q = 1 is the form used for the
    hydrocarbon layer here; q = 2 is the conventional oscillator and gives the
    physical xi^-2 falloff. Both agree at xi = 0 and xi = omega_uv.
    """
    if exponent not in (1, 2):
        raise ConfigError(f"oscillator exponent must be 1 or 2, got {exponent!r}")
    xi_arr, scalar = _as_float_array(xi)
    if np.any(xi_arr < 0):
        raise DomainError("oscillator_eps requires xi >= 0")
    val = 1.0 + (n_ref**2 - 1.0) / (1.0 + (xi_arr / omega_uv) ** exponent)
    return _scalar_or_array(val, scalar)


def drude_loss(omega, omega_p, gamma):
    """Imaginary part eps''(omega) of the Drude model on the real axis.

    This is the loss function whose KK transform reproduces drude_eps exactly:
    eps'' = omega_p^2 gamma / (omega (omega^2 + gamma^2)).
    """
    w_arr, scalar = _as_float_array(omega)
    if np.any(w_arr <= 0):
        raise DomainError("drude_loss requires omega > 0")
    return _scalar_or_array(omega_p**2 * gamma / (w_arr * (w_arr**2 + gamma**2)), scalar)


def ev_to_plasma_wavelength(energy_ev):
    """Convert a plasmon energy in eV to its vacuum wavelength in nm."""
    if energy_ev <= 0:
        raise DomainError("energy must be positive")
    return TWO_PI * HBAR * C_LIGHT / (energy_ev * E_CHARGE) * 1e9


def plasma_frequency_from_density(electron_density):
    """Plasma frequency sqrt(N e^2 / (eps_0 m_e)) in rad/s from N in 1/m^3."""
    if electron_density <= 0:
        raise DomainError("electron density must be positive")
    return math.sqrt(electron_density * E_CHARGE**2 / (EPS_0 * M_E))


# ---------------------------------------------------------------------------
# Kramers-Kronig transform


def _kk_eval(eps_imag, xis, omega_lo, omega_hi, points_per_decade):
    """Trapezoid KK integral on a log grid, vectorized over an array of xi."""
    decades = math.log10(omega_hi / omega_lo)
    n = max(int(round(decades * points_per_decade)), 8) + 1
    u = np.linspace(math.log(omega_lo), math.log(omega_hi), n)
    x = np.exp(u)
    e2 = np.asarray(eps_imag(x), dtype=float)
    if np.any(e2 < 0):
        raise DataQualityError("loss function eps'' went negative inside the KK window")
    # integrand in u = ln x picks up a factor x from the substitution
    h = x * x * e2 / (x[None, :] ** 2 + np.asarray(xis)[:, None] ** 2)
    return 1.0 + (2.0 / math.pi) * np.trapezoid(h, u, axis=1)


def kk_transform(eps_imag, xi, omega_lo=KK_OMEGA_LO, omega_hi=KK_OMEGA_HI,
                 points_per_decade=KK_POINTS_PER_DECADE):
    """Permittivity at imaginary frequency xi from a loss function eps''(omega).

    Parameters
    ----------
    eps_imag : callable
        Vectorized eps''(omega) over the integration window [omega_lo, omega_hi].
    xi : float
        Imaginary-axis angular frequency, rad/s, > 0.
    omega_lo, omega_hi : float
        Integration bounds, rad/s. The defaults span 1e12 to 1e21; widen them
        when the loss function carries weight below 1e12 (the low-frequency
        tail of a conductor contributes ~2*omega_lo/(pi*gamma) of eps-1).
    points_per_decade : int
        Resolution of the logarithmic trapezoid grid. The result is checked
        against a doubled-resolution pass and must agree to 0.1%.

    Returns
    -------
    float
        eps(i xi) >= 1.

    Raises
    ------
    DomainError
        If xi <= 0.
    AccuracyError
        If the refinement pass moves the result by more than 0.1%.
    """
    if xi <= 0:
        raise DomainError("kk_transform requires xi > 0")
    xis = np.array([xi])
    coarse = _kk_eval(eps_imag, xis, omega_lo, omega_hi, points_per_decade)[0]
    fine = _kk_eval(eps_imag, xis, omega_lo, omega_hi, 2 * points_per_decade)[0]
    if abs(fine - coarse) > 1e-3 * abs(fine):
        raise AccuracyError(
            f"KK quadrature not converged at xi={xi:.3e}: "
            f"{coarse:.6e} -> {fine:.6e} on refinement")
    return float(fine)


# ---------------------------------------------------------------------------
# material models


class DielectricModel:
    """Base class: permittivity on the imaginary frequency axis."""

    def eps(self, xi):
        """eps(i xi); accepts scalars or arrays of rad/s."""
        raise NotImplementedError

    def label(self):
        return type(self).__name__.lower()


@dataclass(frozen=True)
class Vacuum(DielectricModel):
    """Unit permittivity at every frequency."""

    def eps(self, xi):
        xi_arr, scalar = _as_float_array(xi)
        if np.any(xi_arr < 0):
            raise DomainError("xi must be >= 0")
        return _scalar_or_array(np.ones_like(xi_arr), scalar)


@dataclass(frozen=True)
class Constant(DielectricModel):
    """Frequency-independent permittivity; mainly a test surrogate."""

    value: float

    def __post_init__(self):
        if self.value < 1:
            raise DomainError("constant permittivity must be >= 1")

    def eps(self, xi):
        xi_arr, scalar = _as_float_array(xi)
        if np.any(xi_arr < 0):
            raise DomainError("xi must be >= 0")
        return _scalar_or_array(np.full_like(xi_arr, self.value), scalar)


@dataclass(frozen=True)
class Drude(DielectricModel):
    """Free-electron metal with relaxation, eps = 1 + omega_p^2/(xi^2 + gamma xi)."""

    omega_p: float
    gamma: float

    def __post_init__(self):
        if self.omega_p <= 0 or self.gamma <= 0:
            raise DomainError("Drude parameters must be positive")

    def eps(self, xi):
        return drude_eps(xi, self.omega_p, self.gamma)


@dataclass(frozen=True)
class Plasma(DielectricModel):
    """Lossless free-electron metal, eps = 1 + omega_p^2/xi^2."""

    omega_p: float

    def __post_init__(self):
        if self.omega_p <= 0:
            raise DomainError("plasma frequency must be positive")

    def eps(self, xi):
        return plasma_eps(xi, self.omega_p)


@dataclass(frozen=True)
class SingleOscillator(DielectricModel):
    """Transparent dielectric with one UV oscillator.

    electron_density, when given, turns on a plasma-model tail above the
    plasma frequency computed from it; the handoff is a hard switch and is in
    general discontinuous, so the tail is off by default.
    """

    n_ref: float
    omega_uv: float
    exponent: int = 1
    electron_density: float | None = None

    def __post_init__(self):
        if self.n_ref <= 1:
            raise DomainError("n_ref must exceed 1")
        if self.omega_uv <= 0:
            raise DomainError("omega_uv must be positive")
        if self.exponent not in (1, 2):
            raise ConfigError(f"oscillator exponent must be 1 or 2, got {self.exponent!r}")

    def plasma_frequency(self):
        """Plasma frequency of the tail, or None when the tail is disabled."""
        if self.electron_density is None:
            return None
        return plasma_frequency_from_density(self.electron_density)

    def eps(self, xi):
        base = oscillator_eps(xi, self.n_ref, self.omega_uv, self.exponent)
        omega_p = self.plasma_frequency()
        if omega_p is None:
            return base
        xi_arr, scalar = _as_float_array(xi)
        base_arr = np.asarray(base, dtype=float)
        tail = np.where(xi_arr > 0, 1.0 + omega_p**2 / np.where(xi_arr > 0, xi_arr, 1.0) ** 2, np.inf)
        out = np.where(xi_arr > omega_p, tail, base_arr)
        return _scalar_or_array(out, scalar)


@dataclass(frozen=True)
class WaterOscillators(DielectricModel):
    """Debye relaxation plus a sum of damped oscillators.

    eps(i xi) = 1 + f/(1 + g xi) + sum_j f_j/(omega_j^2 + xi^2 + g_j xi)

    debye is (f, g) with g in seconds; terms are (f_j, omega_j, g_j) with f_j
    in (rad/s)^2 and omega_j, g_j in rad/s. Parameter values come from the
    run configuration.
    """

    debye: tuple | None
    terms: tuple = ()

    def __post_init__(self):
        if self.debye is None and len(self.terms) == 0:
            raise ConfigError("water model needs a Debye term and/or oscillator terms")
        object.__setattr__(self, "terms", tuple(tuple(t) for t in self.terms))

    def eps(self, xi):
        return water_eps(xi, self)


def water_eps(xi, params):
    """Evaluate the Debye + oscillator-sum permittivity of a WaterOscillators model."""
    if params.debye is None and len(params.terms) == 0:
        raise ConfigError("water model needs a Debye term and/or oscillator terms")
    xi_arr, scalar = _as_float_array(xi)
    if np.any(xi_arr < 0):
        raise DomainError("xi must be >= 0")
    val = np.ones_like(xi_arr)
    if params.debye is not None:
        f, gsec = params.debye
        val = val + f / (1.0 + gsec * xi_arr)
    for f_j, omega_j, g_j in params.terms:
        val = val + f_j / (omega_j**2 + xi_arr**2 + g_j * xi_arr)
    return _scalar_or_array(val, scalar)


@dataclass(frozen=True)
class ImagAxisGrid:
    """Immutable cache of eps(i xi) samples on a log-spaced frequency grid."""

    xi_values: np.ndarray
    eps_values: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi_values, dtype=float)
        ep = np.asarray(self.eps_values, dtype=float)
        if xi.size != ep.size or xi.size < 2:
            raise DataQualityError("grid arrays must match and hold at least 2 points")
        if np.any(np.diff(xi) <= 0):
            raise DataQualityError("grid frequencies must be strictly increasing")
        xi.setflags(write=False)
        ep.setflags(write=False)
        object.__setattr__(self, "xi_values", xi)
        object.__setattr__(self, "eps_values", ep)


@dataclass(frozen=True)
class TabulatedKK(DielectricModel):
    """Material defined by a precomputed eps(i xi) grid.

    Inside the grid, log-log interpolation of eps - 1. Below the grid floor
    the Drude low tail is evaluated in closed form; above the ceiling a
    plasma-type continuation anchored at the last grid point keeps the decay
    physical.
    """

    grid: ImagAxisGrid
    low_tail: tuple  # (omega_p, gamma)

    def eps(self, xi):
        xi_arr, scalar = _as_float_array(xi)
        if np.any(xi_arr <= 0):
            raise DomainError("tabulated model requires xi > 0")
        gx = self.grid.xi_values
        q = np.maximum(self.grid.eps_values - 1.0, 1e-300)
        out = np.empty_like(xi_arr)

        inside = (xi_arr >= gx[0]) & (xi_arr <= gx[-1])
        if np.any(inside):
            lnq = np.interp(np.log(xi_arr[inside]), np.log(gx), np.log(q))
            out[inside] = 1.0 + np.exp(lnq)
        below = xi_arr < gx[0]
        if np.any(below):
            omega_p, gamma = self.low_tail
            out[below] = 1.0 + omega_p**2 / (xi_arr[below] ** 2 + gamma * xi_arr[below])
        above = xi_arr > gx[-1]
        if np.any(above):
            w_hi_sq = (self.grid.eps_values[-1] - 1.0) * gx[-1] ** 2
            out[above] = 1.0 + w_hi_sq / xi_arr[above] ** 2
        # a grid that is identically 1 (lossless table, zero tail) stays exactly 1
        if np.all(self.grid.eps_values == 1.0) and self.low_tail[0] == 0:
            out[...] = 1.0
        return _scalar_or_array(out, scalar)

    def label(self):
        return "tabulated"


# ---------------------------------------------------------------------------
# tabulated optical data


@dataclass(frozen=True)
class OpticalDataTable:
    """Tabulated optical constants (omega in rad/s, n, k), strictly increasing."""

    omega: np.ndarray
    n: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        n = np.asarray(self.n, dtype=float)
        k = np.asarray(self.k, dtype=float)
        if not (w.size == n.size == k.size):
            raise DataQualityError("table columns differ in length")
        if w.size < 2:
            raise DataQualityError("optical table needs at least 2 samples")
        if np.any(w <= 0):
            raise DataQualityError("table frequencies must be positive")
        if np.any(np.diff(w) <= 0):
            raise DataQualityError("table frequencies must be strictly increasing")
        if np.any(n < 0) or np.any(k < 0):
            raise DataQualityError("n and k must be non-negative")
        for arr in (w, n, k):
            arr.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)

    def eps_imag(self):
        """eps'' = 2 n k at the table frequencies."""
        return 2.0 * self.n * self.k

    def max_gap_decades(self):
        return float(np.max(np.diff(np.log10(self.omega))))


def build_gold_model(table, drude, grid_lo=GRID_XI_LO, grid_hi=GRID_XI_HI,
                     grid_points_per_decade=GRID_POINTS_PER_DECADE,
                     omega_lo=KK_OMEGA_LO, omega_hi=KK_OMEGA_HI,
                     points_per_decade=KK_POINTS_PER_DECADE):
    """Metal model from tabulated n, k with a Drude low-frequency extension.

    The loss function used in the KK transform is the table's 2 n k
    (interpolated linearly in log omega) wherever the table has data, the
    Drude loss below the table's lowest frequency, and zero above its highest.
    eps(i xi) is precomputed on a log grid over [grid_lo, grid_hi] and wrapped
    in a TabulatedKK model.

    Parameters
    ----------
    table : OpticalDataTable
    drude : tuple
        (omega_p, gamma) in rad/s for the low-frequency extension.
    grid_lo, grid_hi, grid_points_per_decade :
        Evaluation grid for eps(i xi).
    omega_lo, omega_hi, points_per_decade :
        KK integration window and resolution; see kk_transform.

    Raises
    ------
    DataQualityError
        If adjacent table frequencies are more than one decade apart.
    AccuracyError
        If the KK refinement check fails anywhere on the grid.
    """
    omega_p, gamma = drude
    if table.max_gap_decades() > 1.0:
        raise DataQualityError(
            f"optical table has a {table.max_gap_decades():.2f}-decade gap; "
            "refusing to interpolate across more than one decade")

    w = table.omega
    e2_table = table.eps_imag()

    def eps_imag(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        below = x < w[0]
        if np.any(below) and omega_p > 0:
            out[below] = drude_loss(x[below], omega_p, gamma)
        inside = (x >= w[0]) & (x <= w[-1])
        if np.any(inside):
            out[inside] = np.interp(np.log(x[inside]), np.log(w), e2_table)
        return out  # above the table: zero

    decades = math.log10(grid_hi / grid_lo)
    n_grid = int(round(decades * grid_points_per_decade)) + 1
    xis = np.logspace(math.log10(grid_lo), math.log10(grid_hi), n_grid)
    coarse = _kk_eval(eps_imag, xis, omega_lo, omega_hi, points_per_decade)
    fine = _kk_eval(eps_imag, xis, omega_lo, omega_hi, 2 * points_per_decade)
    bad = np.abs(fine - coarse) > 1e-3 * np.abs(fine)
    if np.any(bad):
        i = int(np.argmax(np.abs(fine - coarse) / np.abs(fine)))
        raise AccuracyError(
            f"KK quadrature not converged at xi={xis[i]:.3e} "
            f"({coarse[i]:.6e} -> {fine[i]:.6e})")
    grid = ImagAxisGrid(xis, fine)
    return TabulatedKK(grid=grid, low_tail=(float(omega_p), float(gamma)))
