"""Report figures. Import of this module must not require a display.

Every function takes prepared arrays plus an output path, draws one figure
and saves it atomically. Styling is pinned here once so repeated runs of the
same command produce byte-identical PNGs.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


def _save(fig, path):
    tmp = os.fspath(path) + ".tmp"
    fig.savefig(tmp, format="png")
    plt.close(fig)
    os.replace(tmp, path)
    return path


def plot_epsilon(xi, eps_by_label, path):
    """log-log permittivity against imaginary frequency, one line per material."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        for label, eps in eps_by_label.items():
            ax.loglog(xi, eps, label=label)
        ax.set_xlabel(r"imaginary frequency $\xi$ (rad/s)")
        ax.set_ylabel(r"$\varepsilon(i\xi)$")
        ax.legend()
        return _save(fig, path)


def plot_force(separations, curves_by_label, path):
    """|F|/(2 pi R) against separation on log-log axes."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        for label, force in curves_by_label.items():
            ax.loglog(separations * 1e9, -force * 1e6, label=label)
        ax.set_xlabel("separation (nm)")
        ax.set_ylabel(r"$|F| / 2\pi R$ ($\mu$N/m)")
        ax.legend()
        return _save(fig, path)


def plot_fit(data_sep, data_force, model_sep, model_force, residuals, path):
    """Measured points with the fitted model, residuals in a lower panel."""
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(
            2, 1, sharex=True, constrained_layout=True,
            gridspec_kw={"height_ratios": [3, 1]})
        ax1.plot(data_sep * 1e9, -data_force * 1e6, ".", ms=3, label="data")
        ax1.plot(model_sep * 1e9, -model_force * 1e6, "-", label="fit")
        ax1.set_yscale("log")
        ax1.set_ylabel(r"$|F| / 2\pi R$ ($\mu$N/m)")
        ax1.legend()
        ax2.axhline(0.0, color="k", lw=0.8)
        ax2.plot(data_sep * 1e9, residuals * 1e6, ".", ms=3)
        ax2.set_xlabel("separation (nm)")
        ax2.set_ylabel(r"resid. ($\mu$N/m)")
        return _save(fig, path)


def plot_error_profile(upper_bounds, rms, relative, path):
    """Accumulated rms against the upper bound, absolute and relative panels."""
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, constrained_layout=True,
                                       figsize=(8.0, 4.0))
        ax1.plot(upper_bounds * 1e9, rms * 1e6, "o-")
        ax1.set_xlabel("upper bound (nm)")
        ax1.set_ylabel(r"rms deviation ($\mu$N/m)")
        ax2.plot(upper_bounds * 1e9, relative * 100.0, "o-")
        ax2.set_xlabel("upper bound (nm)")
        ax2.set_ylabel("rms / |model at lower bound| (%)")
        return _save(fig, path)


def plot_jkr(loads, contact_radius, displacement, pull_off, path):
    """Contact radius and central displacement against applied load."""
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, constrained_layout=True,
                                       figsize=(8.0, 4.0))
        ax1.plot(loads * 1e3, contact_radius * 1e6)
        ax1.axvline(pull_off * 1e3, color="k", ls="--", lw=0.8, label="pull-off")
        ax1.set_xlabel("load (mN)")
        ax1.set_ylabel(r"contact radius ($\mu$m)")
        ax1.legend()
        ax2.plot(loads * 1e3, displacement * 1e9)
        ax2.axvline(pull_off * 1e3, color="k", ls="--", lw=0.8)
        ax2.set_xlabel("load (mN)")
        ax2.set_ylabel("central displacement (nm)")
        return _save(fig, path)


def plot_synthetic(separations, force, jump_in, path):
    """One synthetic approach curve; jump-in separation marked when present."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(constrained_layout=True)
        ax.plot(separations * 1e9, force * 1e6, ".", ms=3)
        if jump_in is not None:
            ax.axvline(jump_in * 1e9, color="r", ls="--", lw=0.9,
                       label=f"jump-in at {jump_in * 1e9:.1f} nm")
            ax.legend()
        ax.set_xlabel("recorded separation (nm)")
        ax.set_ylabel(r"$F / 2\pi R$ ($\mu$N/m)")
        return _save(fig, path)
