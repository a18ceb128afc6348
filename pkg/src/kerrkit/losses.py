"""Power-dependent internal loss and Kerr scaling laws.

Two-level-system saturation of the internal quality factor, the geometric
scaling of the kinetic-inductance self-Kerr coefficient, the associated
nonlinear-resistance bound and cross-Kerr estimates between harmonics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import HBAR, TWO_PI
from .errors import DomainError


@dataclass(frozen=True)
class TlsParams:
    """Two-level-system loss model.

    ``1/Qi(n) = (1/q_tls0) (1 + n/n_c)^(-beta/2) + 1/q_other``
    """

    q_tls0: float
    n_c: float
    beta_exp: float = 1.0
    q_other: float = math.inf

    def __post_init__(self):
        for name in ("q_tls0", "n_c", "q_other"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not 0 < self.beta_exp <= 2:
            raise DomainError(f"beta_exp must lie in (0, 2], got {self.beta_exp!r}")

    @property
    def qi_low_power(self) -> float:
        return 1.0 / (1.0 / self.q_tls0 + 1.0 / self.q_other)

    @property
    def qi_high_power(self) -> float:
        return self.q_other


def qi_of_power(tls: TlsParams, n_ph):
    """Internal quality factor at mean photon number ``n_ph``."""
    n = np.asarray(n_ph, dtype=float)
    if np.any(n < 0):
        raise DomainError("n_ph must be non-negative")
    loss = (1.0 + n / tls.n_c) ** (-0.5 * tls.beta_exp) / tls.q_tls0 + 1.0 / tls.q_other
    out = 1.0 / loss
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KerrGeometry:
    """Wire geometry and film parameters entering the self-Kerr estimate (SI units)."""

    width_m: float
    thickness_m: float
    j_c: float
    l_k: float
    omega0: float

    def __post_init__(self):
        for name in ("width_m", "thickness_m", "j_c", "l_k", "omega0"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def critical_current(self) -> float:
        return self.j_c * self.width_m * self.thickness_m

    @property
    def f0_hz(self) -> float:
        return self.omega0 / TWO_PI


def kerr_scale_factor(g: KerrGeometry) -> float:
    """``hbar omega0^2 L_k / (J_c w t)^2``, the geometry-dependent part of |K|."""
    return HBAR * g.omega0**2 * g.l_k / g.critical_current**2


def kerr_scaling(g: KerrGeometry, calibration: float = 1.0) -> float:
    """Self-Kerr magnitude ``|K|/2pi`` in hertz, up to a calibration constant.

    The mode-profile integral is not computed; ``calibration`` absorbs it
    (and the units) and is obtained with :func:`calibrate_kerr`.
    """
    return calibration * kerr_scale_factor(g)


def calibrate_kerr(g: KerrGeometry, kerr_hz: float) -> float:
    """Calibration constant making :func:`kerr_scaling` reproduce ``|kerr_hz|``."""
    if kerr_hz == 0:
        raise DomainError("cannot calibrate on zero Kerr")
    return abs(kerr_hz) / kerr_scale_factor(g)


def q3_bound(g: KerrGeometry, kerr_hz: float) -> float:
    """Order-of-magnitude ceiling on Qi from nonlinear resistance.

    Evaluated as ``omega0 / |K|`` with both in angular units: the loss rate of
    the nonlinear resistance scales like the Kerr shift, so the quality factor
    it allows is the resonance frequency measured in Kerr shifts.
    """
    if kerr_hz == 0:
        raise DomainError("q3_bound needs a non-zero Kerr coefficient")
    return g.omega0 / (TWO_PI * abs(kerr_hz))


def mode_frequency(omega0: float, m: int) -> float:
    """Angular frequency of harmonic ``m`` of a quarter-wave resonator."""
    if m < 0:
        raise DomainError("mode index must be non-negative")
    return (2 * m + 1) * omega0


def cross_kerr(g: KerrGeometry, m: int, n: int, kerr_hz: float) -> float:
    """Cross-Kerr ``chi_mn / 2pi`` estimate from the self-Kerr (Hz).

    Scales ``kerr_hz`` by ``omega_m omega_n / omega0^2`` for evenly spaced
    harmonics. Mode-overlap factors are of order one and not included.
    """
    wm, wn = mode_frequency(g.omega0, m), mode_frequency(g.omega0, n)
    return kerr_hz * wm * wn / g.omega0**2


def fit_power_law(x, y):
    """Exponent, log-prefactor and exponent 1 sigma of ``|y| = e^b x^a``."""
    lx = np.log(np.asarray(x, dtype=float))
    if lx.size < 3:
        raise DomainError("need at least 3 points")
    reg = stats.linregress(lx, np.log(np.abs(np.asarray(y, dtype=float))))
    return float(reg.slope), float(reg.intercept), float(reg.stderr)
