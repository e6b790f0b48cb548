"""Command-line reports: every subcommand writes delimited tables plus PNGs.

    casimirlab epsilon   permittivities of the configured stack materials
    casimirlab force     dispersion force curve with corrections and ideal limit
    casimirlab fit       offset + electrostatic fit to a measured (or synthetic) curve
    casimirlab errors    accumulated rms profile and model discrimination table
    casimirlab jkr       adhesive-contact summary and load sweep
    casimirlab synth     one synthetic approach curve with jump-in truncation

Outputs carry the config hash and constants version in their headers and no
timestamps, so a rerun of the same command on the same config is
byte-identical; files appear atomically or not at all.
"""

import argparse
import dataclasses
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import (average_curves, electrostatic_term, fit_curve,
                       model_discrimination_study, rms_error_profile,
                       synthesize_measurement)
from .config import RunConfig
from .constants import CONSTANTS_VERSION
from .contact import (jkr_contact_radius, jkr_load_sweep, pull_off_force,
                      select_model, tabor_parameter)
from .dielectric import Drude, Plasma, TabulatedKK, Vacuum
from .errors import (AccuracyError, CasimirLabError, ConfigError, FitError,
                     UsageError)
from .geometry import apply_corrections, effective_radius, ideal_energy_per_area
from .lifshitz import LayerStack, free_energy_with_stats, normalized_force_curve
from .units import parse_frequency, parse_quantity
from . import plotting, tableio

log = logging.getLogger("casimirlab")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3


def _header(command, cfg, seed=None):
    header = {"command": f"casimirlab {command}",
              "package_version": __version__,
              "constants_version": CONSTANTS_VERSION,
              "config_sha256": cfg.sha256}
    if seed is not None:
        header["seed"] = seed
    return header


def _out(args, name):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _column_name(label):
    return "".join(ch if ch.isalnum() else "_" for ch in label)


def _stack_materials(stack):
    """(label, model) pairs worth reporting for a stack."""
    pairs = [(stack.metal.label(), stack.metal)]
    if stack.coating is not None:
        pairs.append((stack.coating.label(), stack.coating))
    if not isinstance(stack.gap, Vacuum):
        pairs.append((stack.gap.label(), stack.gap))
    return pairs


def _force_arrays(stack, separations, radius, ctx):
    """Energies plus Matsubara term counts over a separation grid."""
    energies = np.empty(separations.size)
    terms = np.empty(separations.size, dtype=int)
    for i, d in enumerate(separations):
        energies[i], stats = free_energy_with_stats(stack, d, ctx)
        terms[i] = stats["terms_used"]
    return energies, terms


def _prepared(cfg):
    """Stack, Matsubara context and probe radius, built once per command.

    Reusing one stack instance across the model curves of a command also
    reuses its per-frequency permittivity cache.
    """
    return cfg.stack(), cfg.matsubara(), effective_radius(cfg.geometry())


def _model_curve(prepared, d_lo, d_hi, points=70):
    """Dense model ForceCurve of the configured stack over [d_lo, d_hi]."""
    stack, ctx, radius = prepared
    seps = np.logspace(math.log10(d_lo), math.log10(d_hi), points)
    return normalized_force_curve(stack, seps, radius, ctx)


def _load_or_synthesize(args, cfg, prepared):
    """Measured curve(s) from --data, else one synthesized from [synth].

    Several files are merged with average_curves before any fitting.
    """
    if args.data:
        curves = []
        for path in args.data:
            log.info("reading measured curve from %s", path)
            try:
                curves.append(tableio.read_force_curve(path))
            except OSError as exc:
                raise UsageError(f"cannot read {path}: {exc}") from exc
        if len(curves) == 1:
            return curves[0]
        log.info("averaging %d curves", len(curves))
        return average_curves(curves)
    log.info("no --data given; synthesizing a curve from the [synth] section")
    return _synthesize(args, cfg, prepared)


def _corrected_model(prepared, cfg, d_lo, d_hi, points=70, ignore=False):
    """Model ForceCurve with the configured roughness folded in.

    When a roughness amplitude is set the grid floors at 2.2 A, just above
    the validity edge of the quadratic correction; offsets that would need
    the model below that are outside the correction's reach anyway.
    """
    rough = None if ignore else cfg.roughness()
    if rough is not None:
        d_lo = max(d_lo, 2.2 * rough.amplitude)
    return apply_corrections(_model_curve(prepared, d_lo, d_hi, points), rough)


def _synthesize(args, cfg, prepared):
    """Approach curve drawn from the roughness-corrected model."""
    s = cfg.synth_settings()
    # the generator only needs coverage of the true separations swept, which
    # run from end - delta up to start - delta
    lo = 0.98 * min(s.end, s.end - s.delta)
    hi = 1.02 * max(s.start, s.start - s.delta)
    model = apply_corrections(_model_curve(prepared, lo, hi, points=80),
                              cfg.roughness())
    return synthesize_measurement(
        model, spring_constant=s.spring_constant, start_separation=s.start,
        end_separation=s.end, approach_rate=s.approach_rate,
        sample_rate_hz=s.sample_rate_hz, noise=s.noise, seed=args.seed,
        delta=s.delta, alpha=s.alpha, exponent=s.exponent)


# ---------------------------------------------------------------------------
# subcommands

def cmd_epsilon(args):
    cfg = RunConfig.load(args.config)
    stack = cfg.stack()
    xi = np.logspace(math.log10(parse_frequency(args.xi_min)),
                     math.log10(parse_frequency(args.xi_max)), args.points)
    columns = {"xi_rad_s": xi}
    eps_by_label = {}
    for label, model in _stack_materials(stack):
        eps = np.array([model.eps(x) for x in xi])
        eps_by_label[label] = eps
        columns[f"eps_{_column_name(label)}"] = eps
    table = _out(args, "epsilon_table.txt")
    tableio.write_table(table, columns, _header("epsilon", cfg))
    figure = plotting.plot_epsilon(xi, eps_by_label, _out(args, "epsilon.png"))
    log.info("wrote %s and %s", table, figure)


def cmd_force(args):
    cfg = RunConfig.load(args.config)
    grid = cfg.force_grid()
    d_min = parse_quantity(args.d_min, "length") if args.d_min else grid.d_min
    d_max = parse_quantity(args.d_max, "length") if args.d_max else grid.d_max
    points = args.points if args.points else grid.points
    if not 0 < d_min < d_max:
        raise UsageError("need 0 < d-min < d-max")
    if grid.spacing == "log":
        seps = np.logspace(math.log10(d_min), math.log10(d_max), points)
    else:
        seps = np.linspace(d_min, d_max, points)

    stack, ctx, radius = _prepared(cfg)
    log.info("stack %s, R = %.3g m, T = %.6g K, %d separations in [%.3g, %.3g] nm",
             stack.label(), radius, ctx.temperature, points, d_min * 1e9, d_max * 1e9)
    energies, terms = _force_arrays(stack, seps, radius, ctx)
    log.info("Matsubara terms used: %d to %d", terms.min(), terms.max())

    from .curves import ForceCurve
    raw = ForceCurve(separations=seps, normalized_force=energies, radius=radius,
                     temperature=ctx.temperature, metadata={"stack": stack.label()})
    corrected = apply_corrections(raw, cfg.roughness())
    ideal = ideal_energy_per_area(seps)

    header = _header("force", cfg)
    header["stack"] = stack.label()
    header["radius_m"] = tableio.FLOAT_FMT % radius
    header["temperature_K"] = tableio.FLOAT_FMT % ctx.temperature
    header["max_matsubara_terms"] = int(terms.max())
    table = _out(args, "force_curve.txt")
    tableio.write_table(table, {
        "separation_nm": seps * 1e9,
        "force_uN_per_m": energies * 1e6,
        "corrected_uN_per_m": corrected.normalized_force * 1e6,
        "ideal_uN_per_m": ideal * 1e6,
    }, header)
    figure = plotting.plot_force(seps, {
        "computed": energies,
        "with roughness": corrected.normalized_force,
        "ideal mirrors": ideal,
    }, _out(args, "force.png"))
    log.info("wrote %s and %s", table, figure)


def cmd_fit(args):
    cfg = RunConfig.load(args.config)
    fit = cfg.fit_settings()
    prepared = _prepared(cfg)
    data = _load_or_synthesize(args, cfg, prepared)
    # the model must cover d - delta for every searchable offset; offsets so
    # large that the true separation would go negative are unreachable anyway,
    # so the grid floors out at 2 nm
    lo = max(0.55 * (fit.lower - max(fit.delta_span[1], 0.0)), 2e-9)
    hi = 1.2 * max(fit.upper, fit.upper - min(fit.delta_span[0], 0.0))
    model = _corrected_model(prepared, cfg, lo, hi,
                             ignore=args.ignore_roughness)
    result = fit_curve(data, model, (fit.lower, fit.upper),
                       delta_span=fit.delta_span, alpha_span=fit.alpha_span,
                       exponent=fit.exponent)
    log.info("fit: delta = %.4f nm, alpha = %.4e, rms/|F| = %.3e over %d points",
             result.delta * 1e9, result.alpha, result.rms_relative, result.n_points)

    rough = None if args.ignore_roughness else cfg.roughness()
    source = ", ".join(args.data) if args.data else "synthetic"
    header = _header("fit", cfg, seed=None if args.data else args.seed)
    header["data_source"] = source
    header["model_roughness_nm"] = (tableio.FLOAT_FMT % (rough.amplitude * 1e9)
                                    if rough is not None else "none")
    table = _out(args, "fit_result.txt")
    tableio.write_table(table, {
        "delta_nm": [result.delta * 1e9],
        "alpha": [result.alpha],
        "objective": [result.objective],
        "rms_relative": [result.rms_relative],
        "n_points": [result.n_points],
        "fit_lower_nm": [result.fit_range[0] * 1e9],
        "fit_upper_nm": [result.fit_range[1] * 1e9],
    }, header)

    sorted_data = data.sorted()
    mask = ((sorted_data.separations >= fit.lower)
            & (sorted_data.separations <= fit.upper))
    d_sel = sorted_data.separations[mask]
    f_sel = sorted_data.normalized_force[mask]
    from .analysis import _ModelInterpolator
    interp = _ModelInterpolator(model)
    shifted = d_sel - result.delta
    f_fit = interp.force(shifted) + electrostatic_term(shifted, result.alpha,
                                                       fit.exponent)
    overlay_header = dict(header)
    overlay_header["delta_nm"] = tableio.FLOAT_FMT % (result.delta * 1e9)
    overlay_header["alpha"] = tableio.FLOAT_FMT % result.alpha
    overlay_header["rms_relative"] = tableio.FLOAT_FMT % result.rms_relative
    overlay = _out(args, "fit_overlay.txt")
    tableio.write_table(overlay, {
        "separation_nm": d_sel * 1e9,
        "shifted_nm": shifted * 1e9,
        "measured_uN_per_m": f_sel * 1e6,
        "model_uN_per_m": f_fit * 1e6,
        "residual_uN_per_m": (f_sel - f_fit) * 1e6,
    }, overlay_header)

    stack = prepared[0]
    model_note = (f"{stack.label()}, roughness {rough.amplitude * 1e9:g} nm"
                  if rough is not None else f"{stack.label()}, no roughness")
    report = _out(args, "fit_report.txt")
    tableio.write_text_atomic(report, "\n".join([
        "fit report",
        "==========",
        f"config sha256    {cfg.sha256}",
        f"data source      {source}",
        f"model            {model_note}",
        f"fit window       [{fit.lower * 1e9:.6g}, {fit.upper * 1e9:.6g}] nm"
        f" ({result.n_points} points)",
        f"offset delta     {result.delta * 1e9:.6g} nm"
        f"  (window [{fit.delta_span[0] * 1e9:.6g},"
        f" {fit.delta_span[1] * 1e9:.6g}] nm)",
        f"electrostatic    alpha = {result.alpha:.6g} (exponent {fit.exponent})",
        f"rms residual     {result.rms_relative:.4%} of peak |force|",
    ]) + "\n")

    figure = plotting.plot_fit(d_sel, f_sel, d_sel, f_fit, f_sel - f_fit,
                               _out(args, "fit.png"))
    log.info("wrote %s, %s, %s and %s", table, overlay, report, figure)


def cmd_errors(args):
    cfg = RunConfig.load(args.config)
    settings = cfg.error_settings()
    prepared = _prepared(cfg)
    data = _load_or_synthesize(args, cfg, prepared)
    model = _corrected_model(prepared, cfg, 0.8 * settings.lower,
                             1.2 * settings.upper_max)
    bounds = np.linspace(settings.upper_min, settings.upper_max, settings.n_bounds)
    profile = rms_error_profile(data, model, settings.lower, bounds)

    header = _header("errors", cfg, seed=None if args.data else args.seed)
    header["lower_nm"] = tableio.FLOAT_FMT % (settings.lower * 1e9)
    table = _out(args, "error_profile.txt")
    tableio.write_table(table, {
        "upper_nm": profile.upper_bounds * 1e9,
        "rms_uN_per_m": profile.accumulated_rms * 1e6,
        "relative": profile.relative_to_shortest,
    }, header)

    report_lines = [
        "error profile report",
        "====================",
        f"config sha256    {cfg.sha256}",
        f"data source      {', '.join(args.data) if args.data else 'synthetic'}",
        f"noise floor      {data.noise_floor * 1e6:.4g} uN/m",
        f"lower bound      {settings.lower * 1e9:.6g} nm",
        "",
        "accumulated relative rms against the corrected model:",
    ]
    for upper, rel in zip(profile.upper_bounds, profile.relative_to_shortest):
        report_lines.append(f"  to {upper * 1e9:7.2f} nm   {rel:.4%}")

    stack, ctx, radius = prepared
    alternatives = _alternative_stacks(stack)
    if alternatives:
        seps = np.logspace(math.log10(settings.lower),
                           math.log10(settings.upper_max), 25)
        reference = normalized_force_curve(stack, seps, radius, ctx)
        alt_curves = {label: normalized_force_curve(alt, seps, radius, ctx)
                      for label, alt in alternatives.items()}
        records = model_discrimination_study(reference, alt_curves,
                                             noise_floor=data.noise_floor)
        report_lines += ["", "model variants against the configured stack:"]
        for rec in records:
            line = (f"  {rec.label}: max_rel = {rec.max_rel_difference:.4e} at "
                    f"{rec.separation_at_max * 1e9:.2f} nm, max_abs = "
                    f"{rec.max_abs_difference * 1e6:.4e} uN/m, "
                    f"detectable = {int(rec.exceeds_noise_floor)}")
            report_lines.append(line)
            log.info("discrimination%s", line[1:])

    report = _out(args, "errors_report.txt")
    tableio.write_text_atomic(report, "\n".join(report_lines) + "\n")
    figure = plotting.plot_error_profile(profile.upper_bounds,
                                         profile.accumulated_rms,
                                         profile.relative_to_shortest,
                                         _out(args, "errors.png"))
    log.info("wrote %s, %s and %s", table, report, figure)


def _alternative_stacks(stack):
    """Model variants for the discrimination table."""
    alternatives = {}
    metal = stack.metal
    omega_p = gamma = None
    if isinstance(metal, Drude):
        omega_p, gamma = metal.omega_p, metal.gamma
    elif isinstance(metal, TabulatedKK):
        omega_p, gamma = metal.low_tail
    elif isinstance(metal, Plasma):
        omega_p = metal.omega_p
    if omega_p and not isinstance(metal, Plasma):
        alternatives["plasma_metal"] = dataclasses.replace(
            stack, metal=Plasma(omega_p=omega_p))
    if omega_p and gamma and not isinstance(metal, Drude):
        alternatives["drude_metal"] = dataclasses.replace(
            stack, metal=Drude(omega_p=omega_p, gamma=gamma))
    if stack.coating is not None:
        alternatives["bare_substrate"] = LayerStack(metal=metal, gap=stack.gap)
    return alternatives


def cmd_jkr(args):
    cfg = RunConfig.load(args.config)
    system = cfg.contact_system()
    mu = tabor_parameter(system)
    regime = select_model(mu)
    f_pull = pull_off_force(system)
    a0 = jkr_contact_radius(system, 0.0)
    from .contact import jkr_central_displacement
    delta0 = jkr_central_displacement(system, a0)
    log.info("K = %.4e Pa, Tabor mu = %.4f (%s regime)", system.stiffness(), mu, regime)
    log.info("pull-off = %.4e N, a(0) = %.4e m, delta(0) = %.4e m", f_pull, a0, delta0)

    load_max = (parse_quantity(args.load_max, "force") if args.load_max
                else 3.0 * abs(f_pull))
    if load_max <= f_pull:
        raise UsageError("load-max must exceed the pull-off force")
    loads = np.linspace(f_pull, load_max, args.points)
    radii, displacements = jkr_load_sweep(system, loads)

    header = _header("jkr", cfg)
    header["stiffness_Pa"] = tableio.FLOAT_FMT % system.stiffness()
    header["tabor_mu"] = tableio.FLOAT_FMT % mu
    header["regime"] = regime
    header["pull_off_N"] = tableio.FLOAT_FMT % f_pull
    table = _out(args, "jkr_table.txt")
    tableio.write_table(table, {
        "load_mN": loads * 1e3,
        "contact_radius_um": radii * 1e6,
        "displacement_nm": displacements * 1e9,
    }, header)
    figure = plotting.plot_jkr(loads, radii, displacements, f_pull,
                               _out(args, "jkr.png"))
    log.info("wrote %s and %s", table, figure)


def cmd_synth(args):
    cfg = RunConfig.load(args.config)
    curve = _synthesize(args, cfg, _prepared(cfg))
    jump = curve.metadata.get("jump_in_separation")
    if jump is None:
        log.info("sweep stable down to %.2f nm", curve.separations.min() * 1e9)
    else:
        log.info("jump-in at %.2f nm; %d stable samples kept",
                 jump * 1e9, curve.separations.size)
    table = _out(args, "synthetic_curve.txt")
    tableio.write_force_curve(table, curve, _header("synth", cfg, seed=args.seed))
    figure = plotting.plot_synthetic(curve.separations, curve.normalized_force,
                                     jump, _out(args, "synth.png"))
    log.info("wrote %s and %s", table, figure)


# ---------------------------------------------------------------------------
# parser and entry point

def build_parser():
    parser = argparse.ArgumentParser(
        prog="casimirlab",
        description="Dispersion-force curves, fits and contact mechanics "
                    "for sphere-plate measurements.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="INI run configuration (default: packaged sample)")
    common.add_argument("--out-dir", default=".",
                        help="directory for tables and figures (default: .)")
    common.add_argument("--seed", type=int, default=0,
                        help="random seed for synthesized data (default: 0)")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress messages")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("epsilon", parents=[common],
                       help="tabulate and plot eps(i xi) of the stack materials")
    p.add_argument("--xi-min", default="1e13 rad/s")
    p.add_argument("--xi-max", default="1e18 rad/s")
    p.add_argument("--points", type=int, default=120)
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("force", parents=[common],
                       help="force curve with roughness correction and ideal limit")
    p.add_argument("--d-min", default=None, help='e.g. "20 nm"')
    p.add_argument("--d-max", default=None, help='e.g. "100 nm"')
    p.add_argument("--points", type=int, default=None)
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("fit", parents=[common],
                       help="fit separation offset and electrostatic residual")
    p.add_argument("--data", nargs="+", default=None, metavar="FILE",
                   help="force-curve file(s), averaged when several; "
                        "omitted: synthesize from [synth]")
    p.add_argument("--ignore-roughness", action="store_true",
                   help="fit the bare model even if roughness is configured; "
                        "the fitted offset then absorbs the correction")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("errors", parents=[common],
                       help="accumulated rms profile and model discrimination")
    p.add_argument("--data", nargs="+", default=None, metavar="FILE",
                   help="force-curve file(s), averaged when several; "
                        "omitted: synthesize from [synth]")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("jkr", parents=[common],
                       help="adhesive-contact regime, pull-off and load sweep")
    p.add_argument("--load-max", default=None, help='e.g. "5 mN"')
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_jkr)

    p = sub.add_parser("synth", parents=[common],
                       help="synthesize one approach curve with jump-in")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (ConfigError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (AccuracyError, FitError) as exc:
        log.error("did not converge: %s", exc)
        return EXIT_NOT_CONVERGED
    except CasimirLabError as exc:
        log.error("%s", exc)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
