"""Shared fixtures: reference stacks, contexts and exact power-law curves.

The stacks are session-scoped on purpose: LayerStack caches permittivities
per frequency, so reusing one instance across tests avoids recomputing the
same eps(i xi) values hundreds of times.
"""

import numpy as np
import pytest

from casimirlab.curves import ForceCurve
from casimirlab.dielectric import Drude, SingleOscillator
from casimirlab.lifshitz import LayerStack, MatsubaraContext

# gold-film Drude pair used throughout, rad/s
GOLD_OMEGA_P = 1.4e16
GOLD_GAMMA = 5.3e13


@pytest.fixture(scope="session")
def room_ctx():
    return MatsubaraContext(temperature=298.0)


@pytest.fixture(scope="session")
def bare_drude_stack():
    return LayerStack(metal=Drude(omega_p=GOLD_OMEGA_P, gamma=GOLD_GAMMA))


@pytest.fixture(scope="session")
def coated_drude_stack():
    # 2.1 nm hydrocarbon-like overlayer on the Drude metal
    return LayerStack(metal=Drude(omega_p=GOLD_OMEGA_P, gamma=GOLD_GAMMA),
                      coating=SingleOscillator(n_ref=1.5, omega_uv=3.0e15),
                      thickness=2.1e-9)


def make_power_law(coeff, q=3.0, d_lo=5e-9, d_hi=400e-9, points=60,
                   radius=1e-2):
    """ForceCurve F = -coeff / d^q on a log grid.

    log(-F) is linear in log(d), so the cubic-spline interpolant used by the
    analysis code reproduces force and gradient to machine precision. That
    makes these curves exact references for fitting and jump-in tests.
    """
    d = np.logspace(np.log10(d_lo), np.log10(d_hi), points)
    return ForceCurve(separations=d, normalized_force=-coeff / d**q,
                      radius=radius)


@pytest.fixture(scope="session")
def power_law():
    return make_power_law


# bare-metal configuration for command-line tests: tiny force grid, model
# windows around 40..140 nm, a planted 12 nm offset in [synth]
FAST_CLI_CONFIG = """\
[material.gold]
kind = drude
omega_p = 1.4e16 rad/s
gamma = 5.3e13 rad/s

[stack]
metal = gold

[geometry]
kind = sphere_on_flat
radius = 1 mm

[force]
temperature = 298 K
d_min = 40 nm
d_max = 100 nm
points = 4
spacing = log

[synth]
spring_constant = 1000 N/m
start = 150 nm
end = 50 nm
approach_rate = 80 nm/s
sample_rate = 400 Hz
noise = 0.02 uN/m
delta = 12 nm
alpha = 0 N
exponent = 1

[fit]
lower = 60 nm
upper = 140 nm
delta_min = -5 nm
delta_max = 30 nm
alpha_min = -1e-12 N
alpha_max = 1e-12 N
exponent = 1

[errors]
lower = 60 nm
upper_min = 70 nm
upper_max = 140 nm
n_bounds = 4
"""


@pytest.fixture(scope="session")
def fast_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("config") / "fast.ini"
    path.write_text(FAST_CLI_CONFIG)
    return str(path)
