"""Plain-text tables: optical data in, force curves and reports out.

All files are whitespace-delimited columns with `#` header lines of the form
`# key = value`. Writers are deterministic (no timestamps, fixed formats) and
atomic (temp file in the same directory, then rename), so an interrupted run
never leaves a half-written table and identical inputs give identical bytes.

Optical tables are read as rows of `frequency  unit  n  k` where unit is one
of rad_s, eV, nm; force curves are written as `separation_nm  force_uN_per_m`
with the probe radius and temperature in the header.
"""

import os

import numpy as np

from .curves import DEFAULT_NOISE_FLOOR, ForceCurve
from .dielectric import OpticalDataTable
from .errors import ConfigError, DataQualityError
from .units import convert_frequency

FLOAT_FMT = "%.10e"


def write_text_atomic(path, text):
    """Write text to path via a same-directory temp file and rename."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def format_table(columns, header=None):
    """Render named columns plus `# key = value` header lines to one string.

    columns is a dict of name -> 1-D array; all must share a length. Header
    values are written verbatim via str().
    """
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise DataQualityError("table columns differ in length")
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key} = {value}")
    lines.append("# columns = " + " ".join(names))
    for i in range(length):
        lines.append(" ".join(FLOAT_FMT % a[i] for a in arrays))
    return "\n".join(lines) + "\n"


def write_table(path, columns, header=None):
    """Atomically write a `#`-headed whitespace table; see format_table."""
    write_text_atomic(path, format_table(columns, header))


def _parse_header_and_rows(path, n_cols=None):
    """Split a table file into a header dict and float rows."""
    header = {}
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    header[key.strip()] = value.strip()
                continue
            parts = line.split()
            if n_cols is not None and len(parts) != n_cols:
                raise DataQualityError(
                    f"{path}:{lineno}: expected {n_cols} columns, got {len(parts)}")
            rows.append((lineno, parts))
    return header, rows


def read_optical_table(path):
    """Read tabulated optical constants: rows of `frequency unit n k`.

    The unit column takes rad_s, eV or nm per row; everything is converted to
    angular frequency in rad/s and sorted ascending. Malformed rows raise
    DataQualityError with the offending line number.
    """
    _, rows = _parse_header_and_rows(path, n_cols=4)
    if not rows:
        raise DataQualityError(f"{path}: no data rows")
    omega, n_col, k_col = [], [], []
    for lineno, parts in rows:
        try:
            value = float(parts[0])
            n_val = float(parts[2])
            k_val = float(parts[3])
        except ValueError as exc:
            raise DataQualityError(f"{path}:{lineno}: non-numeric field") from exc
        try:
            omega.append(convert_frequency(value, parts[1]))
        except ConfigError as exc:
            raise DataQualityError(f"{path}:{lineno}: {exc}") from exc
        n_col.append(n_val)
        k_col.append(k_val)
    order = np.argsort(omega, kind="stable")
    return OpticalDataTable(omega=np.asarray(omega)[order],
                            n=np.asarray(n_col)[order],
                            k=np.asarray(k_col)[order])


def write_force_curve(path, curve, extra_header=None):
    """Write a ForceCurve as `separation_nm force_uN_per_m` with `#` headers.

    The header carries radius, temperature, noise floor and the curve's
    metadata; extra_header entries (e.g. the run's config hash) go first.
    """
    header = dict(extra_header or {})
    header["radius_m"] = FLOAT_FMT % curve.radius
    header["temperature_K"] = FLOAT_FMT % curve.temperature
    header["noise_floor_N_per_m"] = FLOAT_FMT % curve.noise_floor
    for key, value in curve.metadata.items():
        header[f"meta_{key}"] = "none" if value is None else value
    write_table(path, {"separation_nm": curve.separations * 1e9,
                       "force_uN_per_m": curve.normalized_force * 1e6},
                header)


def read_force_curve(path):
    """Read a force curve written by write_force_curve back into a ForceCurve."""
    header, rows = _parse_header_and_rows(path, n_cols=2)
    if not rows:
        raise DataQualityError(f"{path}: no data rows")
    if "radius_m" not in header:
        raise DataQualityError(f"{path}: header lacks radius_m")
    try:
        sep = np.array([float(p[0]) for _, p in rows]) * 1e-9
        force = np.array([float(p[1]) for _, p in rows]) * 1e-6
    except ValueError as exc:
        raise DataQualityError(f"{path}: non-numeric data row") from exc

    metadata = {}
    for key, value in header.items():
        if key.startswith("meta_"):
            metadata[key[len("meta_"):]] = _coerce(value)
    return ForceCurve(
        separations=sep, normalized_force=force,
        radius=float(header["radius_m"]),
        temperature=float(header.get("temperature_K", 298.0)),
        noise_floor=float(header.get("noise_floor_N_per_m", DEFAULT_NOISE_FLOOR)),
        metadata=metadata)


def _coerce(text):
    """Best-effort header value: none, int, float, else the string itself."""
    if text == "none":
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text
