"""Steady-state response of a side-coupled Kerr-nonlinear resonator.

The resonator is treated as a one-port Kerr cavity behind a lossless
three-port splitter. In reduced units

    delta = (omega - omega0) / (kappa + gamma)
    xi    = |a_in|^2 kappa K / (kappa + gamma)^3,   |a_in|^2 = P_in / (hbar omega)
    n     = |a|^2 (kappa + gamma)^2 / (kappa |a_in|^2)

the normalized photon number obeys

    n (1/4 + delta^2) - 2 delta xi n^2 + xi^2 n^3 = 1/2          (*)

and the reflection off the cavity port is

    Gamma = 1 - kappa/(kappa + gamma) / (1/2 + i (delta - xi n)).

Transmission past the splitter with an impedance-mismatch rotation phi,
normalized to its off-resonant value cos(phi), is

    S21 = 1 - kappa/(kappa + gamma) e^{i phi}/cos(phi) / (1 + 2 i (delta - xi n)).

The printed versions of (*) and of S21 in the source derivation drop the
factor ``n`` on the first term of (*) and flip the sign of ``xi n`` in S21;
both are corrected here so that the on-resonance maximum is ``n = 2`` and the
onset of bistability is ``xi = -2/sqrt(27)``.

Rates are in hertz (``kappa_hz = kappa / 2 pi``) at every public interface.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .constants import H_PLANCK, TWO_PI, dbm_to_watts
from .errors import DomainError, KerrkitError

#: Onset of bistability of (*).
XI_CRIT = -2.0 / math.sqrt(27.0)

#: |discriminant| below this (monic cubic in y = xi n) counts as a double root.
DISCRIMINANT_TOL = 1e-14


class Branch(str, enum.Enum):
    SINGLE = "single"
    LOW = "low"
    UNSTABLE = "unstable"
    HIGH = "high"


class Sweep(str, enum.Enum):
    UP = "up"
    DOWN = "down"


def _sweep(direction) -> Sweep:
    try:
        return Sweep(direction)
    except ValueError:
        raise DomainError(f"sweep direction must be 'up' or 'down', got {direction!r}") from None


@dataclass(frozen=True)
class ResonatorParams:
    """Resonator parameters.

    Parameters
    ----------
    f0_hz : float
        Zero-power resonance frequency.
    kappa_hz : float
        External coupling rate ``kappa / 2 pi``.
    gamma_hz : float
        Internal loss rate ``gamma / 2 pi``.
    phi_rad : float
        Impedance-mismatch rotation of the coupling, ``|phi| < pi/2``.
    kerr_hz : float
        Self-Kerr shift per photon ``K / 2 pi``; negative for kinetic inductance.
    """

    f0_hz: float
    kappa_hz: float
    gamma_hz: float
    phi_rad: float = 0.0
    kerr_hz: float = 0.0

    def __post_init__(self):
        if not self.f0_hz > 0:
            raise DomainError(f"f0_hz must be positive, got {self.f0_hz!r}")
        if not self.kappa_hz > 0:
            raise DomainError(f"kappa_hz must be positive, got {self.kappa_hz!r}")
        if not self.gamma_hz >= 0:
            raise DomainError(f"gamma_hz must be non-negative, got {self.gamma_hz!r}")
        if not abs(self.phi_rad) < 0.5 * math.pi:
            raise DomainError(f"|phi_rad| must be below pi/2, got {self.phi_rad!r}")
        if not math.isfinite(self.kerr_hz):
            raise DomainError("kerr_hz must be finite")

    @classmethod
    def from_quality(cls, f0_hz, qi, qe_star, phi_rad=0.0, kerr_hz=0.0) -> "ResonatorParams":
        """Build from ``Qi`` and the coupling magnitude ``Qe* = |Qe|``.

        With ``Qe = Qe* exp(-i phi)`` the external rate is
        ``kappa = omega0 Re[1/Qe] = omega0 cos(phi) / Qe*``.
        """
        gamma = 0.0 if math.isinf(qi) else f0_hz / qi
        return cls(f0_hz, f0_hz * math.cos(phi_rad) / qe_star, gamma, phi_rad, kerr_hz)

    @property
    def linewidth_hz(self) -> float:
        return self.kappa_hz + self.gamma_hz

    @property
    def q_loaded(self) -> float:
        return self.f0_hz / self.linewidth_hz

    @property
    def qi(self) -> float:
        return math.inf if self.gamma_hz == 0 else self.f0_hz / self.gamma_hz

    @property
    def qe_star(self) -> float:
        return self.f0_hz * math.cos(self.phi_rad) / self.kappa_hz

    @property
    def coupling_fraction(self) -> float:
        """``kappa / (kappa + gamma)``."""
        return self.kappa_hz / self.linewidth_hz

    def replace(self, **changes) -> "ResonatorParams":
        fields = dict(
            f0_hz=self.f0_hz,
            kappa_hz=self.kappa_hz,
            gamma_hz=self.gamma_hz,
            phi_rad=self.phi_rad,
            kerr_hz=self.kerr_hz,
        )
        fields.update(changes)
        return ResonatorParams(**fields)


@dataclass(frozen=True)
class DriveCondition:
    """Incident power on port 1 (W) and drive frequency (Hz, scalar or array)."""

    p_in_w: float
    f_drive_hz: float | np.ndarray

    def __post_init__(self):
        if not self.p_in_w >= 0:
            raise DomainError(f"p_in_w must be non-negative, got {self.p_in_w!r}")

    @classmethod
    def from_dbm(cls, p_dbm, f_drive_hz):
        return cls(dbm_to_watts(p_dbm), f_drive_hz)

    def photon_flux(self):
        """``|a_in|^2 = P_in / (h f)`` in photons per second."""
        return self.p_in_w / (H_PLANCK * np.asarray(self.f_drive_hz, dtype=float))

    def delta(self, params: ResonatorParams):
        return reduced_detuning(params, self.f_drive_hz)

    def xi(self, params: ResonatorParams):
        return reduced_drive(params, self.p_in_w, self.f_drive_hz)


def reduced_detuning(params: ResonatorParams, f_hz):
    """``delta = (f - f0) / (kappa_hz + gamma_hz)``."""
    return (np.asarray(f_hz, dtype=float) - params.f0_hz) / params.linewidth_hz


def reduced_drive(params: ResonatorParams, p_in_w, f_hz):
    """``xi = |a_in|^2 kappa K / (kappa + gamma)^3`` with angular rates."""
    flux = p_in_w / (H_PLANCK * np.asarray(f_hz, dtype=float))
    kappa, kerr, total = (TWO_PI * r for r in (params.kappa_hz, params.kerr_hz, params.linewidth_hz))
    return flux * kappa * kerr / total**3


def power_for_xi(params: ResonatorParams, xi, f_hz=None):
    """Incident power (W) producing reduced drive ``xi`` at ``f_hz`` (default f0)."""
    if params.kerr_hz == 0:
        raise DomainError("power_for_xi needs a non-zero Kerr coefficient")
    f = params.f0_hz if f_hz is None else f_hz
    unit = reduced_drive(params, 1.0, f)
    p = np.asarray(xi, dtype=float) / unit
    if np.any(p < 0):
        raise DomainError("xi must have the sign of kerr_hz")
    return float(p) if np.ndim(p) == 0 else p


def photons_per_reduced(params: ResonatorParams, p_in_w, f_hz):
    """Factor converting reduced occupation ``n`` to photons ``|a|^2``."""
    flux = p_in_w / (H_PLANCK * np.asarray(f_hz, dtype=float))
    kappa, total = TWO_PI * params.kappa_hz, TWO_PI * params.linewidth_hz
    return flux * kappa / total**2


# --------------------------------------------------------------------------
# cubic


@dataclass(frozen=True)
class SteadyState:
    n_reduced: float
    branch: Branch
    bifurcated: bool
    n_ph: float = float("nan")

    def with_photons(self, scale: float) -> "SteadyState":
        return SteadyState(self.n_reduced, self.branch, self.bifurcated, self.n_reduced * scale)


def cubic_discriminant(delta, xi):
    """Discriminant of the monic cubic ``y^3 - 2 delta y^2 + (delta^2 + 1/4) y - xi/2``.

    ``y = xi n``; positive means three distinct real roots.
    """
    d = np.asarray(delta, dtype=float)
    x = np.asarray(xi, dtype=float)
    b, c, e = -2.0 * d, d * d + 0.25, -0.5 * x
    return 18 * b * c * e - 4 * b**3 * e + b * b * c * c - 4 * c**3 - 27 * e * e


def cubic_residual(n, delta, xi):
    """Residual of ``n (1/4 + delta^2) - 2 delta xi n^2 + xi^2 n^3 - 1/2``."""
    return n * (0.25 + delta * delta) - 2 * delta * xi * n * n + xi * xi * n**3 - 0.5


def _shift_roots(delta, xi):
    """Real roots ``y`` of the monic shift cubic, shape ``(N, 3)``, NaN-padded."""
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    x = np.atleast_1d(np.asarray(xi, dtype=float))
    d, x = np.broadcast_arrays(d, x)
    d, x = d.ravel(), x.ravel()
    b, c, e = -2.0 * d, d * d + 0.25, -0.5 * x
    # depressed cubic t^3 + p t + q with y = t - b/3
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + e
    disc = -(4.0 * p**3 + 27.0 * q * q)

    roots = np.full((d.size, 3), np.nan)
    three = disc > DISCRIMINANT_TOL
    double = np.abs(disc) <= DISCRIMINANT_TOL
    one = ~(three | double)

    if np.any(three):
        pp, qq = p[three], q[three]
        m = 2.0 * np.sqrt(-pp / 3.0)
        arg = np.clip(3.0 * qq / (pp * m), -1.0, 1.0)
        theta = np.arccos(arg) / 3.0
        k = np.arange(3)[None, :]
        roots[three] = m[:, None] * np.cos(theta[:, None] - TWO_PI * k / 3.0) + shift[three, None]

    if np.any(one):
        pp, qq = p[one], q[one]
        s = np.sqrt(qq * qq / 4.0 + pp**3 / 27.0)
        a = -np.sign(qq) * np.cbrt(np.abs(qq) / 2.0 + s)
        a = np.where(qq == 0, np.cbrt(s), a)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(a != 0, a - pp / (3.0 * a), 0.0)
        roots[one, 0] = t + shift[one]

    if np.any(double):
        pp, qq = p[double], q[double]
        with np.errstate(divide="ignore", invalid="ignore"):
            simple = np.where(pp != 0, 3.0 * qq / pp, 0.0)
            twin = np.where(pp != 0, -1.5 * qq / pp, 0.0)
        roots[double] = np.stack([simple, twin, twin], axis=1) + shift[double, None]

    # one Newton step on the shift cubic, skipped where the slope vanishes
    y = roots
    f = y**3 + b[:, None] * y * y + c[:, None] * y + e[:, None]
    df = 3 * y * y + 2 * b[:, None] * y + c[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        step = f / df
    ok = np.isfinite(step) & (np.abs(df) > 1e-6)
    y = np.where(ok, y - step, y)
    return y, disc


def _n_from_shift(y, delta):
    # exact rearrangement of (*) with xi n = y; finite even at xi = 0
    return 0.5 / ((delta - y) ** 2 + 0.25)


def photon_roots(delta, xi):
    """Vectorized reduced photon-number roots.

    Returns ``(n, count)`` where ``n`` has shape ``(N, 3)`` sorted ascending
    along the last axis (NaN where fewer roots exist) and ``count`` is 1 or 3.
    """
    d = np.atleast_1d(np.asarray(delta, dtype=float)).ravel()
    x = np.atleast_1d(np.asarray(xi, dtype=float)).ravel()
    d, x = np.broadcast_arrays(d, x)
    y, disc = _shift_roots(d, x)
    n = _n_from_shift(y, d[:, None])
    n = np.sort(n, axis=1)  # NaN sorts last
    count = np.where(disc >= -DISCRIMINANT_TOL, 3, 1)
    return n, count


def solve_photon_cubic(delta: float, xi: float) -> list[SteadyState]:
    """All real roots of the steady-state cubic, sorted by ``n`` ascending."""
    if not (math.isfinite(delta) and math.isfinite(xi)):
        raise DomainError("delta and xi must be finite")
    n, count = photon_roots(delta, xi)
    values = n[0, : int(count[0])]
    if count[0] == 1:
        return [SteadyState(float(values[0]), Branch.SINGLE, False)]
    labels = (Branch.LOW, Branch.UNSTABLE, Branch.HIGH)
    return [SteadyState(float(v), lab, True) for v, lab in zip(values, labels)]


def select_branch(roots: Sequence[SteadyState], sweep_direction="up") -> SteadyState:
    """Pick the observed steady state.

    An upward sweep follows the high-occupation branch wherever three roots
    coexist, a downward sweep the low one. A unique root is returned as is.
    """
    if not roots:
        raise KerrkitError("select_branch received no roots")
    if len(roots) == 1:
        return roots[0]
    direction = _sweep(sweep_direction)
    return max(roots, key=lambda r: r.n_reduced) if direction is Sweep.UP else min(roots, key=lambda r: r.n_reduced)


def branch_n(delta, xi, sweep_direction="up"):
    """Vectorized :func:`select_branch`: reduced photon number per point."""
    shape = np.broadcast(np.asarray(delta), np.asarray(xi)).shape
    n, count = photon_roots(delta, xi)
    direction = _sweep(sweep_direction)
    hi = np.nanmax(n, axis=1)
    lo = np.nanmin(n, axis=1)
    chosen = np.where(count == 3, hi if direction is Sweep.UP else lo, n[:, 0])
    return chosen.reshape(shape) if shape else float(chosen[0])


def fold_curve(u):
    """Detuning and drive at which the cubic has a double root.

    Parametrized by ``u = delta - xi n`` at the double root:
    ``delta = (3u^2 + 1/4)/(2u)`` and ``xi = (u^2 + 1/4)^2 / u``.
    """
    u = np.asarray(u, dtype=float)
    return (3 * u * u + 0.25) / (2 * u), (u * u + 0.25) ** 2 / u


def bifurcation_threshold() -> float:
    """Weakest drive with a bistable window, located numerically.

    The boundary of the three-root region is the fold curve; its extremum in
    ``xi`` is the cusp where bistability first appears. Searching the fold
    curve rather than the discriminant keeps the result accurate to rounding,
    because near the cusp the root count itself is ill-conditioned.
    """
    res = optimize.minimize_scalar(
        lambda u: -float(fold_curve(u)[1]),
        bounds=(-2.0, -1e-3),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(fold_curve(res.x)[1])


def is_bifurcated(xi: float) -> bool:
    """True when the drive admits a bistable detuning window."""
    return xi < XI_CRIT or (xi > -XI_CRIT)


# --------------------------------------------------------------------------
# transmission


def s21_linear(params: ResonatorParams, f_hz):
    """Low-power transmission ``1 - (Q/Qe*) e^{i phi} / (1 + 2 i Q (f - f0)/f0)``."""
    f = np.asarray(f_hz, dtype=float)
    q = params.q_loaded
    x = (f - params.f0_hz) / params.f0_hz
    return 1.0 - (q / params.qe_star) * np.exp(1j * params.phi_rad) / (1.0 + 2j * q * x)


def _reflection(c, delta, xi_n):
    return 1.0 - c / (0.5 + 1j * (delta - xi_n))


def steady_state(params: ResonatorParams, drive: DriveCondition, sweep_direction="up"):
    """Reduced detuning, drive and selected reduced occupation at each drive frequency."""
    delta = drive.delta(params)
    xi = drive.xi(params)
    n = branch_n(delta, xi, sweep_direction)
    return delta, xi, n


def gamma_reflection(params: ResonatorParams, drive: DriveCondition, sweep_direction="up"):
    """Reflection coefficient of the Kerr cavity port."""
    delta, xi, n = steady_state(params, drive, sweep_direction)
    return _reflection(params.coupling_fraction, delta, xi * n)


def s21_nonlinear(params: ResonatorParams, drive: DriveCondition, sweep_direction="up"):
    """Steady-state transmission of the driven Kerr resonator."""
    delta, xi, n = steady_state(params, drive, sweep_direction)
    phi = params.phi_rad
    rot = np.exp(1j * phi) / math.cos(phi)
    return 1.0 - params.coupling_fraction * rot / (1.0 + 2j * (delta - xi * n))


def s21_from_gamma(gamma, phi_rad):
    """Transmission past the mismatched splitter, normalized by ``cos(phi)``."""
    return (gamma * np.exp(1j * phi_rad) + np.exp(-1j * phi_rad)) / (2.0 * math.cos(phi_rad))


def scattering_matrix(gamma, phi_rad=0.0):
    """Two-port S-matrix of the splitter terminated by a port of reflection ``gamma``.

    ``S = gamma e^{i phi} P - e^{-i phi} Q`` with ``P``, ``Q`` the projectors onto
    the even and odd port combinations; unitary whenever ``|gamma| = 1``.
    Far from resonance (``gamma = 1``) it gives ``|S21| = cos phi``, ``|S11| = sin phi``.
    """
    g = complex(gamma)
    a, b = g * np.exp(1j * phi_rad), np.exp(-1j * phi_rad)
    return 0.5 * np.array([[a - b, a + b], [a + b, a - b]])


def photons_from_power(params: ResonatorParams, drive: DriveCondition, sweep_direction="up"):
    """Mean intracavity photon number ``|a|^2``."""
    _, _, n = steady_state(params, drive, sweep_direction)
    return n * photons_per_reduced(params, drive.p_in_w, drive.f_drive_hz)


def power_for_photons(params: ResonatorParams, n_ph: float, f_hz=None, sweep_direction="up") -> float:
    """Incident power (W) that puts ``n_ph`` photons in the resonator at ``f_hz``."""
    if n_ph < 0:
        raise DomainError("n_ph must be non-negative")
    if n_ph == 0:
        return 0.0
    f = params.f0_hz if f_hz is None else f_hz

    def mismatch(log_p):
        drive = DriveCondition(math.exp(log_p), f)
        return math.log(float(photons_from_power(params, drive, sweep_direction)) / n_ph)

    # linear estimate brackets the root; n_ph grows monotonically with power
    # on a fixed branch away from the bistable window
    linear = n_ph / float(photons_per_reduced(params, 1.0, f) * branch_n(reduced_detuning(params, f), 0.0))
    lo, hi = math.log(linear) - 5.0, math.log(linear) + 5.0
    while mismatch(lo) > 0:
        lo -= 5.0
    while mismatch(hi) < 0:
        hi += 5.0
    return math.exp(optimize.brentq(mismatch, lo, hi, xtol=1e-14, rtol=1e-15))


def resonance_shift(params: ResonatorParams, n_ph):
    """Shift (Hz) of the occupation maximum for ``n_ph`` photons: ``K n_ph / 2 pi``."""
    n = np.asarray(n_ph, dtype=float)
    if np.any(n < 0):
        raise DomainError("n_ph must be non-negative")
    out = params.kerr_hz * n
    return float(out) if out.ndim == 0 else out


def peak_occupation(params: ResonatorParams, p_in_w: float, f_hz, sweep_direction="up"):
    """Frequency and photon number at the occupation maximum of a sweep."""
    drive = DriveCondition(p_in_w, np.asarray(f_hz, dtype=float))
    n_ph = photons_from_power(params, drive, sweep_direction)
    i = int(np.argmax(n_ph))
    return float(drive.f_drive_hz[i]), float(n_ph[i])


# --------------------------------------------------------------------------
# traces


@dataclass
class ComplexTrace:
    """A complex transmission sweep with its acquisition metadata."""

    freq_hz: np.ndarray
    s21: np.ndarray
    p_in_w: float = float("nan")
    temperature_k: float = float("nan")
    sweep_direction: str = "up"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.freq_hz = np.asarray(self.freq_hz, dtype=float)
        self.s21 = np.asarray(self.s21, dtype=complex)
        if self.freq_hz.ndim != 1 or self.freq_hz.size == 0:
            raise DomainError("trace must hold a non-empty 1-D frequency array")
        if self.s21.shape != self.freq_hz.shape:
            raise DomainError("freq_hz and s21 must have the same length")
        if np.any(np.diff(self.freq_hz) <= 0):
            raise DomainError("trace frequencies must be strictly increasing")
        self.sweep_direction = _sweep(self.sweep_direction).value

    def __len__(self):
        return self.freq_hz.size

    @property
    def points(self):
        return list(zip(self.freq_hz.tolist(), self.s21.tolist()))

    @property
    def power_dbm(self) -> float:
        return 10.0 * math.log10(self.p_in_w) + 30.0 if self.p_in_w > 0 else float("nan")


def simulate_trace(
    params: ResonatorParams,
    f_hz,
    p_in_w: float = 0.0,
    sweep_direction="up",
    temperature_k: float = float("nan"),
) -> ComplexTrace:
    """Noiseless transmission trace at fixed incident power."""
    f = np.asarray(f_hz, dtype=float)
    s21 = s21_nonlinear(params, DriveCondition(p_in_w, f), sweep_direction)
    return ComplexTrace(f, s21, p_in_w, temperature_k, _sweep(sweep_direction).value)


def frequency_grid(params: ResonatorParams, span_linewidths: float = 10.0, points: int = 1001, center_hz=None):
    """Uniform grid of ``points`` frequencies spanning ``span_linewidths`` linewidths."""
    center = params.f0_hz if center_hz is None else center_hz
    half = 0.5 * span_linewidths * params.linewidth_hz
    return np.linspace(center - half, center + half, points)
