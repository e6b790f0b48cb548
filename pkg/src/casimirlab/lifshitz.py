"""Finite-temperature dispersion force between layered half-spaces.

Free energy per unit area of two parallel bodies across a gap, as a Matsubara
sum over imaginary frequencies xi_n = 2 pi n k_B T / hbar:

    E(d, T) = (k_B T / 8 pi d^2) * sum'_n I(xi_n, d)

where the prime halves the n = 0 term and

    I(xi, d) = (2 xi d / c)^2 int_1^inf p [ ln(1 - dbar^2 e^-y)
                                          + ln(1 - dk^2  e^-y) ] dp,
    y = 2 p xi d / c.

dbar and dk are the two-polarization reflection amplitudes of each body seen
from the gap; a coating of thickness a enters through the standard two-layer
composition with its own phase factor exp(-2 xi a s2 / c). The sphere-plate
force per unit circumference follows from the proximity relation
F / (2 pi R) = E(D), which is what ForceCurve stores.

Conventions: body 1 is the substrate, 2 the coating, 3 the gap. s_k means
sqrt(p^2 - 1 + eps_k) with permittivities taken relative to the gap, so for a
vacuum gap s_3 = p exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, HBAR, K_B
from .curves import EnergyCurve, ForceCurve
from .dielectric import DielectricModel, Vacuum
from .errors import AccuracyError, DomainError

# wavevector integral cap for the thermal terms; the integrand has decayed by
# e^-y long before this at any separation of interest here (d >= 1 nm)
P_CAP = 1e4

# the n = 0 term is taken as the xi -> 0+ limit of I, evaluated at a frequency
# this far below the first Matsubara frequency
ZERO_TERM_XI_FRACTION = 1e-8

# integrate the limit term out to y = 2 p xi d / c of this size; e^-60 ~ 1e-26
ZERO_TERM_Y_MAX = 60.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class LayerStack:
    """One body of the two-body system: substrate, optional coating, gap medium.

    Both bodies are taken identical (the symmetric sphere-plate arrangement),
    so a single stack fixes both reflection amplitudes.
    """

    metal: DielectricModel
    coating: DielectricModel | None = None
    thickness: float = 0.0
    gap: DielectricModel = field(default_factory=Vacuum)

    def __post_init__(self):
        if self.thickness < 0:
            raise DomainError("coating thickness must be >= 0")
        if self.coating is not None and self.thickness == 0:
            raise DomainError("coating model given but thickness is zero")
        # permittivities depend on xi alone, not separation, so one curve
        # evaluation hits each Matsubara frequency many times; not a field,
        # so equality and repr stay value-based
        object.__setattr__(self, "_eps_cache", {})

    def label(self):
        base = self.metal.label()
        if self.coating is None:
            return base
        return f"{base}+{self.coating.label()}({self.thickness * 1e9:.3g}nm)"


@dataclass(frozen=True)
class MatsubaraContext:
    """Temperature and the convergence knobs of the frequency sum.

    The sum is extended by doubling the term count until the partial sum
    changes by less than convergence_rel_tol; each term's wavevector integral
    is refined by panel doubling to quad_rel_tol.
    """

    temperature: float
    convergence_rel_tol: float = 1e-4
    term_budget: int = 2**20
    quad_rel_tol: float = 1e-5

    def __post_init__(self):
        if self.temperature <= 0:
            raise DomainError("temperature must be positive")
        if not (0 < self.convergence_rel_tol < 1):
            raise DomainError("convergence_rel_tol must lie in (0, 1)")
        if not (0 < self.quad_rel_tol < 1):
            raise DomainError("quad_rel_tol must lie in (0, 1)")
        if self.term_budget < 8:
            raise DomainError("term budget must allow at least 8 terms")

    def xi(self, n):
        """n-th Matsubara frequency 2 pi n k_B T / hbar, rad/s."""
        if n < 0:
            raise DomainError("Matsubara index must be >= 0")
        return 2.0 * math.pi * n * K_B * self.temperature / HBAR


def fresnel_deltas(eps_i, eps_j, p):
    """Two-polarization reflection amplitudes at the i|j interface.

    Permittivities are relative to the gap medium. Returns (dbar_ij, d_ij),
    the TM and TE amplitudes

        dbar_ij = (s_j eps_i - s_i eps_j) / (s_j eps_i + s_i eps_j)
        d_ij    = (s_j - s_i) / (s_j + s_i)

    with s_k = sqrt(p^2 - 1 + eps_k). Both have magnitude <= 1 for real
    eps >= 0 and p >= 1.
    """
    s_i = np.sqrt(p * p - 1.0 + eps_i)
    s_j = np.sqrt(p * p - 1.0 + eps_j)
    dbar = (s_j * eps_i - s_i * eps_j) / (s_j * eps_i + s_i * eps_j)
    d = (s_j - s_i) / (s_j + s_i)
    return dbar, d


def composite_delta_31(stack, xi, p):
    """Reflection amplitudes of the full body seen from the gap.

    For a bare substrate these are the 3|1 interface amplitudes; with a
    coating the 3|2 and 2|1 amplitudes are combined through

        (d_32 + d_21 e^-phi) / (1 + d_32 d_21 e^-phi),
        phi = 2 xi a s_2 sqrt(eps_3) / c

    which reduces to the bare result with d shifted by 2a when the coating
    matches the gap. p may be an array.
    """
    if xi <= 0:
        raise DomainError("composite_delta_31 requires xi > 0")
    cached = stack._eps_cache.get(xi)
    if cached is None:
        eps3 = float(stack.gap.eps(xi))
        e1 = float(stack.metal.eps(xi)) / eps3
        e2 = None if stack.coating is None else float(stack.coating.eps(xi)) / eps3
        cached = (e1, e2, eps3)
        stack._eps_cache[xi] = cached
    e1, e2, eps3 = cached
    if e2 is None:
        return fresnel_deltas(1.0, e1, p)
    db32, d32 = fresnel_deltas(1.0, e2, p)
    db21, d21 = fresnel_deltas(e2, e1, p)
    s2 = np.sqrt(p * p - 1.0 + e2)
    decay = np.exp(-2.0 * xi * stack.thickness * s2 * math.sqrt(eps3) / C_LIGHT)
    dbar = (db32 + db21 * decay) / (1.0 + db32 * db21 * decay)
    d = (d32 + d21 * decay) / (1.0 + d32 * d21 * decay)
    return dbar, d


def _gl_log_panels(f, a, b, rel_tol, start_panels=32, max_panels=2**14):
    """Integrate f over [a, b] with Gauss-Legendre panels uniform in log x.

    f must accept an array. Panels are doubled until two successive passes
    agree to rel_tol; failure to converge within max_panels raises.
    """
    ua, ub = math.log(a), math.log(b)
    prev = None
    panels = start_panels
    while panels <= max_panels:
        edges = np.linspace(ua, ub, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        # nodes shape (panels, order); flattened for a single f call
        u = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        x = np.exp(u)
        vals = f(x.ravel()).reshape(u.shape) * x  # d x = x d u
        total = float(np.sum(vals * _GL_WEIGHTS[None, :] * half[:, None]))
        if prev is not None:
            if abs(total - prev) <= rel_tol * max(abs(total), 1e-300):
                return total
        prev = total
        panels *= 2
    raise AccuracyError(
        f"wavevector quadrature not converged after {max_panels} panels "
        f"(last {prev:.6e})")


def _log_integrand(stack, xi, beta, p):
    """p [ln(1 - dbar^2 e^-beta p) + ln(1 - d^2 e^-beta p)] for array p.

    log1p keeps full relative precision when the product is tiny (deep in the
    exponential tail), where forming 1 - x first would leave pure roundoff.
    """
    dbar, d = composite_delta_31(stack, xi, p)
    damp = np.exp(-beta * p)
    return p * (np.log1p(-dbar * dbar * damp) + np.log1p(-d * d * damp))


def integrand_I(stack, xi, d, quad_rel_tol=1e-5, p_cap=P_CAP):
    """Dimensionless wavevector integral I(xi, d) of one Matsubara term.

    Parameters
    ----------
    stack : LayerStack
    xi : float
        Imaginary-axis angular frequency, rad/s, > 0.
    d : float
        Surface separation, m, > 0.
    quad_rel_tol : float
        Convergence target of the panel-doubling quadrature.
    p_cap : float
        Upper limit of the p integral; the integrand has decayed to nothing
        there for every thermal term at the separations this package targets.

    Returns
    -------
    float
        I(xi, d) <= 0.
    """
    if xi <= 0:
        raise DomainError("integrand_I requires xi > 0; the n = 0 term is a limit")
    if d <= 0:
        raise DomainError("separation must be positive")
    eps3 = stack.gap.eps(xi)
    beta = 2.0 * xi * d * math.sqrt(eps3) / C_LIGHT
    val = _gl_log_panels(lambda p: _log_integrand(stack, xi, beta, p),
                         1.0, p_cap, quad_rel_tol)
    return beta * beta * val


def _zero_frequency_term(stack, d, ctx):
    """xi -> 0+ limit of I(xi, d), the classical half-weight term.

    Evaluated at a proxy frequency far below the first Matsubara frequency,
    with the p integral taken out to where the exponential has died rather
    than to the fixed thermal cap: the limit concentrates at p ~ c / (2 xi d),
    which runs off to infinity as xi -> 0. TE of a relaxing conductor dies in
    the limit, TE of a lossless plasma survives, and constant dielectrics get
    their static reflection; all three emerge from the same proxy.
    """
    xi_t = ZERO_TERM_XI_FRACTION * ctx.xi(1)
    eps3 = stack.gap.eps(xi_t)
    beta = 2.0 * xi_t * d * math.sqrt(eps3) / C_LIGHT
    p_max = ZERO_TERM_Y_MAX / beta
    val = _gl_log_panels(lambda p: _log_integrand(stack, xi_t, beta, p),
                         1.0, p_max, ctx.quad_rel_tol, start_panels=128)
    return beta * beta * val


def free_energy_with_stats(stack, d, ctx):
    """Free energy per unit area E(d, T) plus sum diagnostics.

    Returns
    -------
    (float, dict)
        The energy in J/m^2 (negative for attraction) and a dict with
        terms_used, zero_term, last_rel_change and xi_max.
    """
    if d <= 0:
        raise DomainError("separation must be positive")
    zero = _zero_frequency_term(stack, d, ctx)
    terms = []

    def extend(n_target):
        while len(terms) < n_target:
            n = len(terms) + 1
            terms.append(integrand_I(stack, ctx.xi(n), d, ctx.quad_rel_tol))

    n_terms = 8
    extend(n_terms)
    s_prev = 0.5 * zero + sum(terms)
    while True:
        n_terms *= 2
        if n_terms > ctx.term_budget:
            raise AccuracyError(
                f"Matsubara sum not converged within {ctx.term_budget} terms "
                f"at d={d:.3e} m")
        extend(n_terms)
        s_now = 0.5 * zero + sum(terms)
        rel = abs(s_now - s_prev) / max(abs(s_now), 1e-300)
        if rel < ctx.convergence_rel_tol:
            break
        s_prev = s_now
    energy = K_B * ctx.temperature / (8.0 * math.pi * d * d) * s_now
    stats = {"terms_used": n_terms, "zero_term": zero,
             "last_rel_change": rel, "xi_max": ctx.xi(n_terms)}
    return energy, stats


def free_energy_per_area(stack, d, ctx):
    """Free energy per unit area at separation d, J/m^2."""
    return free_energy_with_stats(stack, d, ctx)[0]


def energy_curve(stack, separations, ctx):
    """E(d) sampled at an increasing array of separations, as an EnergyCurve."""
    seps = np.asarray(separations, dtype=float)
    energies = np.array([free_energy_per_area(stack, d, ctx) for d in seps])
    return EnergyCurve(separations=seps, energy_per_area=energies,
                       temperature=ctx.temperature, stack_label=stack.label())


def normalized_force_curve(stack, separations, radius, ctx, metadata=None):
    """Sphere-plate force per circumference F / (2 pi R) = E(D), as a ForceCurve.

    The proximity relation holds for R much larger than every separation;
    radius is carried on the curve so absolute force can be recovered.
    """
    if radius <= 0:
        raise DomainError("radius must be positive")
    seps = np.asarray(separations, dtype=float)
    if seps.size and radius < 100.0 * np.max(seps):
        raise DomainError("proximity relation needs R >> D (factor 100 enforced)")
    energies = np.array([free_energy_per_area(stack, d, ctx) for d in seps])
    meta = {"stack": stack.label()}
    if metadata:
        meta.update(metadata)
    return ForceCurve(separations=seps, normalized_force=energies, radius=radius,
                      temperature=ctx.temperature, metadata=meta)
