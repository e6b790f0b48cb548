"""Run configuration: one INI file describing materials, stack and protocols.

Dimensioned values are written as "value unit" strings ("2.1 nm", "298 K",
"5.3e13 rad/s") and parsed through units.parse_quantity, so files stay
readable and unit slips fail loudly instead of silently rescaling a run.
Material sections are named [material.NAME] and referenced from [stack] by
NAME; the table key of a tabulated material accepts either a filesystem path
or builtin:gold-sample for the synthetic sample shipped with the package.
"""

import configparser
import hashlib
from dataclasses import dataclass
from importlib import resources

from .contact import ContactSystem, Material
from .dielectric import (Constant, Drude, Plasma, SingleOscillator, Vacuum,
                         WaterOscillators, build_gold_model)
from .errors import ConfigError
from .geometry import (CrossedCylinders, ParallelPlates, RoughnessSpec,
                       SphereOnFlat)
from .lifshitz import LayerStack, MatsubaraContext
from .units import parse_float, parse_frequency, parse_quantity

BUILTIN_PREFIX = "builtin:"
BUILTIN_TABLES = {"gold-sample": "gold_sample_nk.txt"}


def builtin_table_path(name):
    """Filesystem path of a packaged optical table, e.g. 'gold-sample'."""
    if name not in BUILTIN_TABLES:
        raise ConfigError(f"unknown builtin table {name!r}; "
                          f"have {sorted(BUILTIN_TABLES)}")
    return str(resources.files("casimirlab").joinpath("data", BUILTIN_TABLES[name]))


def default_config_path():
    """Path of the sample configuration shipped with the package."""
    return str(resources.files("casimirlab").joinpath("data", "sample_config.ini"))


@dataclass(frozen=True)
class FitSettings:
    lower: float
    upper: float
    delta_span: tuple
    alpha_span: tuple
    exponent: int


@dataclass(frozen=True)
class ForceGrid:
    d_min: float
    d_max: float
    points: int
    spacing: str  # "log" or "linear"


@dataclass(frozen=True)
class ErrorSettings:
    lower: float
    upper_min: float
    upper_max: float
    n_bounds: int


@dataclass(frozen=True)
class SynthSettings:
    spring_constant: float
    start: float
    end: float
    approach_rate: float
    sample_rate_hz: float
    noise: float
    delta: float
    alpha: float
    exponent: int


class RunConfig:
    """Parsed configuration with builders for the package's core objects."""

    def __init__(self, text, source="<string>"):
        self.text = text
        self.source = source
        self.sha256 = hashlib.sha256(text.encode()).hexdigest()
        parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from exc
        self._cp = parser

    @classmethod
    def load(cls, path=None):
        """Read a config file; with path None, the packaged sample config."""
        path = default_config_path() if path is None else str(path)
        try:
            with open(path) as fh:
                return cls(fh.read(), source=path)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    # -- raw access helpers -------------------------------------------------

    def _get(self, section, key, fallback=None):
        try:
            return self._cp.get(section, key)
        except (configparser.NoSectionError, configparser.NoOptionError):
            if fallback is not None:
                return fallback
            raise ConfigError(f"{self.source}: missing [{section}] {key}") from None

    def _quantity(self, section, key, dimension, fallback=None):
        raw = self._get(section, key, fallback)
        return parse_quantity(raw, dimension) if isinstance(raw, str) else raw

    def _float(self, section, key, fallback=None):
        raw = self._get(section, key, fallback)
        return parse_float(raw) if isinstance(raw, str) else raw

    def _int(self, section, key, fallback=None):
        raw = self._get(section, key, fallback)
        if isinstance(raw, str):
            try:
                return int(raw)
            except ValueError:
                raise ConfigError(
                    f"{self.source}: [{section}] {key} must be an integer, "
                    f"got {raw!r}") from None
        return raw

    # -- materials and stack --------------------------------------------------

    def material(self, name):
        """Build the dielectric model defined by [material.NAME]."""
        if name == "vacuum":
            return Vacuum()
        section = f"material.{name}"
        if not self._cp.has_section(section):
            raise ConfigError(f"{self.source}: no [{section}] section")
        kind = self._get(section, "kind")
        if kind == "vacuum":
            return Vacuum()
        if kind == "constant":
            return Constant(self._float(section, "value"))
        if kind == "drude":
            return Drude(omega_p=parse_frequency(self._get(section, "omega_p")),
                         gamma=parse_frequency(self._get(section, "gamma")))
        if kind == "plasma":
            return Plasma(omega_p=parse_frequency(self._get(section, "omega_p")))
        if kind == "oscillator":
            density = self._get(section, "electron_density", fallback="")
            return SingleOscillator(
                n_ref=self._float(section, "n_ref"),
                omega_uv=parse_frequency(self._get(section, "omega_uv")),
                exponent=self._int(section, "exponent", fallback="1"),
                electron_density=(parse_quantity(density, "number_density")
                                  if density else None))
        if kind == "water":
            debye = None
            strength = self._get(section, "debye_strength", fallback="")
            if strength:
                debye = (parse_float(strength),
                         self._quantity(section, "debye_time", "time"))
            terms = []
            raw = self._get(section, "oscillators", fallback="")
            for chunk in filter(None, (c.strip() for c in raw.split(","))):
                parts = chunk.split()
                if len(parts) != 3:
                    raise ConfigError(
                        f"{self.source}: [{section}] oscillators entries need "
                        f"3 numbers (strength omega gamma), got {chunk!r}")
                terms.append(tuple(parse_float(p) for p in parts))
            return WaterOscillators(debye=debye, terms=tuple(terms))
        if kind == "tabulated":
            from .tableio import read_optical_table  # deferred: avoids cycle
            ref = self._get(section, "table")
            path = (builtin_table_path(ref[len(BUILTIN_PREFIX):])
                    if ref.startswith(BUILTIN_PREFIX) else ref)
            table = read_optical_table(path)
            return build_gold_model(
                table,
                drude=(parse_frequency(self._get(section, "drude_omega_p")),
                       parse_frequency(self._get(section, "drude_gamma"))))
        raise ConfigError(f"{self.source}: unknown material kind {kind!r}")

    def stack(self):
        metal = self.material(self._get("stack", "metal"))
        coating_name = self._get("stack", "coating", fallback="none")
        gap = self.material(self._get("stack", "gap", fallback="vacuum"))
        if coating_name == "none":
            return LayerStack(metal=metal, gap=gap)
        return LayerStack(
            metal=metal, coating=self.material(coating_name),
            thickness=self._quantity("stack", "coating_thickness", "length"),
            gap=gap)

    # -- contexts and protocol settings ---------------------------------------

    def matsubara(self):
        return MatsubaraContext(
            temperature=self._quantity("force", "temperature", "temperature",
                                       fallback="298 K"),
            convergence_rel_tol=self._float("force", "convergence_rel_tol",
                                            fallback="1e-4"),
            term_budget=self._int("force", "term_budget", fallback=str(2**20)),
            quad_rel_tol=self._float("force", "quad_rel_tol", fallback="1e-5"))

    def geometry(self):
        kind = self._get("geometry", "kind", fallback="sphere_on_flat")
        if kind == "sphere_on_flat":
            return SphereOnFlat(self._quantity("geometry", "radius", "length"))
        if kind == "crossed_cylinders":
            return CrossedCylinders(
                self._quantity("geometry", "radius_1", "length"),
                self._quantity("geometry", "radius_2", "length"))
        if kind == "parallel_plates":
            return ParallelPlates()
        raise ConfigError(f"{self.source}: unknown geometry kind {kind!r}")

    def roughness(self):
        amp = self._quantity("force", "roughness_amplitude", "length", fallback="0 nm")
        return RoughnessSpec(amp) if amp > 0 else None

    def force_grid(self):
        grid = ForceGrid(
            d_min=self._quantity("force", "d_min", "length", fallback="20 nm"),
            d_max=self._quantity("force", "d_max", "length", fallback="100 nm"),
            points=self._int("force", "points", fallback="40"),
            spacing=self._get("force", "spacing", fallback="log"))
        if grid.spacing not in ("log", "linear"):
            raise ConfigError(f"{self.source}: spacing must be log or linear")
        if not 0 < grid.d_min < grid.d_max:
            raise ConfigError(f"{self.source}: need 0 < d_min < d_max")
        if grid.points < 2:
            raise ConfigError(f"{self.source}: need at least 2 grid points")
        return grid

    def fit_settings(self):
        return FitSettings(
            lower=self._quantity("fit", "lower", "length", fallback="20 nm"),
            upper=self._quantity("fit", "upper", "length", fallback="100 nm"),
            delta_span=(self._quantity("fit", "delta_min", "length", fallback="-5 nm"),
                        self._quantity("fit", "delta_max", "length", fallback="30 nm")),
            alpha_span=(self._quantity("fit", "alpha_min", "alpha", fallback="-1e-22 N*m"),
                        self._quantity("fit", "alpha_max", "alpha", fallback="1e-22 N*m")),
            exponent=self._int("fit", "exponent", fallback="1"))

    def error_settings(self):
        return ErrorSettings(
            lower=self._quantity("errors", "lower", "length", fallback="20 nm"),
            upper_min=self._quantity("errors", "upper_min", "length", fallback="25 nm"),
            upper_max=self._quantity("errors", "upper_max", "length", fallback="100 nm"),
            n_bounds=self._int("errors", "n_bounds", fallback="16"))

    def synth_settings(self):
        return SynthSettings(
            spring_constant=self._quantity("synth", "spring_constant", "stiffness",
                                           fallback="0.02 N/m"),
            start=self._quantity("synth", "start", "length", fallback="200 nm"),
            end=self._quantity("synth", "end", "length", fallback="10 nm"),
            approach_rate=self._quantity("synth", "approach_rate", "speed",
                                         fallback="80 nm/s"),
            sample_rate_hz=self._quantity("synth", "sample_rate", "rate",
                                          fallback="400 Hz"),
            noise=self._quantity("synth", "noise", "force_per_length",
                                 fallback="0.1 uN/m"),
            delta=self._quantity("synth", "delta", "length", fallback="0 nm"),
            alpha=self._quantity("synth", "alpha", "alpha", fallback="0 N*m"),
            exponent=self._int("synth", "exponent", fallback="1"))

    def contact_system(self):
        def material(prefix):
            return Material(
                youngs_modulus=self._quantity("contact", f"{prefix}_modulus",
                                              "pressure", fallback="7.8e10 Pa"),
                poisson_ratio=self._float("contact", f"{prefix}_poisson",
                                          fallback="0.42"))

        return ContactSystem(
            sphere=material("sphere"), flat=material("flat"),
            radius=self._quantity("contact", "radius", "length", fallback="10 mm"),
            work_of_adhesion=self._quantity("contact", "work_of_adhesion",
                                            "energy_per_area", fallback="0.05 J/m^2"),
            equilibrium_distance=self._quantity("contact", "equilibrium_distance",
                                                "length", fallback="3 A"))
