"""Physical constants (CODATA 2018) and unit helpers.

All rates at public interfaces are in hertz; the ``angular`` helper is the
single place where a factor of 2*pi enters.
"""

import math

HBAR = 1.054571817e-34  # J s
H_PLANCK = 6.62607015e-34  # J s
K_B = 1.380649e-23  # J / K

TWO_PI = 2.0 * math.pi

#: Ratio Delta0 / (kB Tc) used for NbN films.
GAP_RATIO = 2.08


def angular(f_hz):
    """Convert a frequency or rate in hertz to rad/s."""
    return TWO_PI * f_hz


def dbm_to_watts(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w):
    return 10.0 * math.log10(p_w) + 30.0
