"""Temperature dependence of a dirty-limit BCS superconductor.

Gap, Mattis-Bardeen complex conductivity below the pair-breaking edge,
conduction-limited quality factor and the kinetic-inductance frequency
shift. Temperatures are in kelvin, frequencies in hertz, energies in joules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.special import expit

from .constants import HBAR, H_PLANCK, K_B, TWO_PI
from .errors import DomainError, UnsupportedRegimeError
from .materials import gap_energy

QUAD_EPSREL = 1e-8
_EULER_GAMMA = 0.5772156649015329
# weak-coupling BCS: Delta(0) = pi exp(-gamma_E) kB Tc
_BCS_WEAK_RATIO = math.pi * math.exp(-_EULER_GAMMA)


@dataclass(frozen=True)
class BcsParams:
    """Parameters of the temperature-dependent internal-loss model.

    ``alpha`` is the kinetic inductance fraction, ``q_i_max`` the
    temperature-independent ceiling on the internal quality factor and
    ``f0_hz`` the resonance frequency at zero temperature.
    """

    tc_k: float
    alpha: float
    q_i_max: float
    f0_hz: float

    def __post_init__(self):
        if not self.tc_k > 0:
            raise DomainError(f"tc_k must be positive, got {self.tc_k!r}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not self.q_i_max > 0:
            raise DomainError(f"q_i_max must be positive, got {self.q_i_max!r}")
        if not self.f0_hz > 0:
            raise DomainError(f"f0_hz must be positive, got {self.f0_hz!r}")
        if H_PLANCK * self.f0_hz >= 2 * gap_energy(self.tc_k):
            raise DomainError("f0_hz lies above the pair-breaking edge 2*Delta0/h")


@dataclass(frozen=True)
class ComplexConductivity:
    sigma1_over_n: float
    sigma2_over_n: float

    @property
    def ratio(self) -> float:
        return self.sigma2_over_n / self.sigma1_over_n


def _check_temperature(t_k):
    if not (t_k >= 0 and math.isfinite(t_k)):
        raise DomainError(f"temperature must be non-negative, got {t_k!r}")


GAP_MODELS = ("interp", "tanh", "bcs")


def gap_of_t(t_k: float, tc_k: float, gap_model: str = "interp") -> float:
    """Superconducting gap in joules, scaled to ``Delta0 = 2.08 kB Tc``.

    gap_model:
        ``"interp"``  ``tanh(1.82 (1.018 (Tc/T - 1))**0.51)``, within 1% of BCS
                      for T < 0.75 Tc (default)
        ``"tanh"``    the cruder ``tanh(1.74 sqrt(Tc/T - 1))``
        ``"bcs"``     weak-coupling gap equation solved numerically
    """
    _check_temperature(t_k)
    if gap_model not in GAP_MODELS:
        raise ValueError(f"unknown gap_model {gap_model!r}; choose from {GAP_MODELS}")
    delta0 = gap_energy(tc_k)
    if t_k >= tc_k:
        return 0.0
    if t_k == 0:
        return delta0
    x = tc_k / t_k - 1.0
    if gap_model == "bcs":
        return delta0 * bcs_gap_ratio(t_k / tc_k)
    if gap_model == "tanh":
        return delta0 * math.tanh(1.74 * math.sqrt(x))
    return delta0 * math.tanh(1.82 * (1.018 * x) ** 0.51)


def bcs_gap_ratio(t_reduced: float) -> float:
    """Solve the weak-coupling gap equation for ``Delta(T)/Delta(0)``.

    Energies are measured in units of ``Delta(0)``; the equation is

        ln(1/r) = 2 * int_0^inf f(sqrt(x^2 + r^2)) / sqrt(x^2 + r^2) dx

    with ``f`` the Fermi function at ``kB T = t_reduced / 1.764``.
    """
    if t_reduced >= 1:
        return 0.0
    if t_reduced <= 0:
        return 1.0
    kt = t_reduced / _BCS_WEAK_RATIO

    def excess(r):
        def integrand(x):
            e = math.hypot(x, r)
            return expit(-e / kt) / e

        upper = math.sqrt(max((40 * kt + r) ** 2 - r * r, 0.0)) + 40 * kt
        val, _ = integrate.quad(integrand, 0.0, upper, epsabs=1e-14, epsrel=1e-12, limit=200)
        return math.log(1.0 / r) - 2.0 * val

    # excess(r) decreases with r; root is bracketed by a tiny gap and Delta(0)
    lo = 1e-12
    if excess(1.0) >= 0:
        return 1.0
    if excess(lo) <= 0:
        return 0.0
    return optimize.brentq(excess, lo, 1.0, xtol=1e-15, rtol=1e-13)


def _sigma1(delta, hw, kt, epsrel):
    # E = delta cosh(u) removes the sqrt(E^2 - delta^2) edge singularity
    def integrand(u):
        e = delta * math.cosh(u)
        occupation = expit(-e / kt) - expit(-(e + hw) / kt)
        num = e * e + delta * delta + hw * e
        return occupation * num / math.sqrt((e + hw) ** 2 - delta * delta)

    # occupation difference is below ~e^-60 past E = delta + 60 kT
    u_max = math.acosh(1.0 + 60.0 * kt / delta)
    val, _ = integrate.quad(integrand, 0.0, u_max, epsabs=0.0, epsrel=epsrel, limit=400)
    return 2.0 * val / hw


def _sigma2(delta, hw, kt, epsrel):
    # E = (delta - hw/2) + (hw/2) sin(theta) removes both inverse-sqrt edges
    # of the interval [delta - hw, delta]
    mid = delta - 0.5 * hw
    half = 0.5 * hw

    def integrand(theta):
        e = mid + half * math.sin(theta)
        thermal = math.tanh((e + hw) / (2.0 * kt)) if kt > 0 else 1.0
        num = e * e + delta * delta + hw * e
        return thermal * num / math.sqrt((delta + e) * (e + hw + delta))

    val, _ = integrate.quad(integrand, -0.5 * math.pi, 0.5 * math.pi, epsabs=0.0, epsrel=epsrel, limit=400)
    return val / hw


def mattis_bardeen(
    t_k: float,
    f_hz: float,
    tc_k: float,
    *,
    gap_model: str = "interp",
    epsrel: float = QUAD_EPSREL,
) -> ComplexConductivity:
    """Dirty-limit Mattis-Bardeen conductivity ratios for ``h f < 2 Delta(T)``."""
    _check_temperature(t_k)
    if not t_k > 0:
        raise DomainError("mattis_bardeen requires t_k > 0")
    if not f_hz > 0:
        raise DomainError(f"f_hz must be positive, got {f_hz!r}")
    delta = gap_of_t(t_k, tc_k, gap_model=gap_model)
    hw = H_PLANCK * f_hz
    if hw >= 2.0 * delta:
        raise UnsupportedRegimeError(
            f"photon energy h*f = {hw:.3e} J is not below 2*Delta(T) = {2 * delta:.3e} J"
        )
    kt = K_B * t_k
    return ComplexConductivity(_sigma1(delta, hw, kt, epsrel), _sigma2(delta, hw, kt, epsrel))


def q_conduction(t_k: float, params: BcsParams, **kwargs) -> float:
    """Conduction-loss quality factor ``sigma2 / (alpha sigma1)``."""
    s = mattis_bardeen(t_k, params.f0_hz, params.tc_k, **kwargs)
    if s.sigma1_over_n == 0:
        return math.inf
    return s.sigma2_over_n / (params.alpha * s.sigma1_over_n)


def q_total(t_k: float, params: BcsParams, **kwargs) -> float:
    """Internal quality factor from conduction loss plus a fixed ceiling."""
    q_sigma = q_conduction(t_k, params, **kwargs)
    return 1.0 / (1.0 / params.q_i_max + 1.0 / q_sigma)


def penetration_depth_ratio(t_k: float, tc_k: float, gap_model: str = "interp") -> float:
    """Dirty-limit ``lambda(T) / lambda(0)``."""
    if not 0 < t_k < tc_k:
        raise DomainError(f"temperature must lie in (0, Tc), got {t_k!r}")
    delta0 = gap_energy(tc_k)
    delta = gap_of_t(t_k, tc_k, gap_model=gap_model)
    return 1.0 / math.sqrt(delta / delta0 * math.tanh(delta0 / (2.0 * K_B * t_k)))


def freq_shift_ratio(t_k: float, params: BcsParams | float, gap_model: str = "interp") -> float:
    """``f0(T)/f0(0)`` in the kinetic-inductance-dominated limit (alpha -> 1).

    For ``alpha < 1`` combine :func:`sigma2_ratio` with the geometric
    inductance yourself; no interpolation is applied here.
    """
    tc_k = params.tc_k if isinstance(params, BcsParams) else float(params)
    return 1.0 / penetration_depth_ratio(t_k, tc_k, gap_model)


def sigma2_ratio(t_k: float, f_hz: float, tc_k: float, t_ref_k: float | None = None) -> float:
    """``sigma2(T) / sigma2(T_ref)``, with ``T_ref`` defaulting to 1e-3 Tc."""
    t_ref = 1e-3 * tc_k if t_ref_k is None else t_ref_k
    return mattis_bardeen(t_k, f_hz, tc_k).sigma2_over_n / mattis_bardeen(t_ref, f_hz, tc_k).sigma2_over_n


def zero_temperature_sigma2(f_hz: float, tc_k: float) -> float:
    """Low-frequency zero-temperature limit ``pi Delta0 / (hbar omega)``."""
    return math.pi * gap_energy(tc_k) / (HBAR * TWO_PI * f_hz)


def temperature_sweep(params: BcsParams, temps_k) -> dict[str, np.ndarray]:
    """Evaluate ``q_total`` and ``freq_shift_ratio`` over a temperature grid."""
    temps = np.asarray(temps_k, dtype=float)
    qi = np.array([q_total(t, params) for t in temps])
    ratio = np.array([freq_shift_ratio(t, params) for t in temps])
    return {"t_k": temps, "qi": qi, "f0_ratio": ratio}
