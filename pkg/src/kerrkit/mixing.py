"""Degenerate four-wave mixing in the stiff-pump approximation.

A strong pump at reduced detuning ``delta`` and drive ``xi`` sets the
intracavity occupation ``n``. A weak signal offset from the pump by
``Delta = (omega_s - omega_p) / (kappa + gamma)`` then sees the linearized
response governed by the eigenrates

    lambda_pm = 1/2 +- sqrt((xi n)^2 - (delta - 2 xi n)^2)

and is reflected with one-port gain

    g_s = 1 - c (1/2 - i (delta - 2 xi n - Delta)) / ((i Delta + lambda_+)(i Delta + lambda_-))

where ``c = kappa / (kappa + gamma)``. The idler at ``-Delta`` follows from the
same 2x2 linear system; its amplitude is

    g_i = i c xi conj(alpha_p)^2 / ((i Delta + lambda_+)(i Delta + lambda_-))

with ``alpha_p`` the normalized pump amplitude (``|alpha_p|^2 = n``). The
idler expression does not appear in the source derivation; it is the
off-diagonal element of the linearized response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParametricThresholdError
from .resonator import ResonatorParams, branch_n

#: |(i Delta + lambda_+)(i Delta + lambda_-)| below this is treated as the pole.
POLE_TOL = 1e-15


@dataclass(frozen=True)
class PumpPoint:
    """Linearization point set by the pump.

    ``alpha_pump`` is the normalized complex pump amplitude for a real,
    positive incident pump field; ``coupling`` is ``kappa / (kappa + gamma)``.
    """

    delta_p: float
    xi: float
    n_pump: float
    lambda_plus: complex
    lambda_minus: complex
    alpha_pump: complex
    coupling: float = 1.0
    phi_rad: float = 0.0

    @property
    def detuning_shifted(self) -> float:
        """``delta - 2 xi n``, the pump detuning seen by the signal."""
        return self.delta_p - 2.0 * self.xi * self.n_pump


def eigenrates(delta_p, xi, n_pump):
    """``lambda_pm`` using the principal complex square root."""
    xn = xi * n_pump
    root = np.sqrt(np.asarray(xn * xn - (delta_p - 2 * xn) ** 2, dtype=complex))
    return 0.5 + root, 0.5 - root


def pump_point(params: ResonatorParams, delta_p: float, xi: float, sweep_direction="up") -> PumpPoint:
    """Solve the pump steady state and linearize around it."""
    n = float(branch_n(delta_p, xi, sweep_direction))
    lp, lm = eigenrates(delta_p, xi, n)
    # incident field a_in = -a1_in / sqrt(2) with a1_in real positive
    alpha = (-1.0 / math.sqrt(2.0)) / (0.5 + 1j * (delta_p - xi * n))
    return PumpPoint(
        float(delta_p),
        float(xi),
        n,
        complex(lp),
        complex(lm),
        complex(alpha),
        params.coupling_fraction,
        params.phi_rad,
    )


def _denominator(pp: PumpPoint, delta_s):
    d = np.asarray(delta_s, dtype=float)
    return (1j * d + pp.lambda_plus) * (1j * d + pp.lambda_minus)


def _checked_denominator(pp, delta_s):
    den = _denominator(pp, delta_s)
    if np.any(np.abs(den) < POLE_TOL):
        raise ParametricThresholdError(
            f"signal response at the parametric-oscillation pole (delta={pp.delta_p}, xi={pp.xi})"
        )
    return den


def _signal_numerator(pp, delta_s):
    return 0.5 - 1j * (pp.detuning_shifted - np.asarray(delta_s, dtype=float))


def gain_one_port(pp: PumpPoint, delta_s):
    """Reflection gain of the signal at the cavity port."""
    den = _checked_denominator(pp, delta_s)
    out = 1.0 - pp.coupling * _signal_numerator(pp, delta_s) / den
    return complex(out) if np.ndim(out) == 0 else out


def gain_idler(pp: PumpPoint, delta_s):
    """Idler amplitude at ``-Delta`` per unit signal input (one-port)."""
    den = _checked_denominator(pp, delta_s)
    out = 1j * pp.coupling * pp.xi * np.conj(pp.alpha_pump) ** 2 / den
    return complex(out) if np.ndim(out) == 0 else out


def gain_forward(params: ResonatorParams, pp: PumpPoint, delta_s):
    """Signal gain in the direction of propagation (port 1 to port 2)."""
    den = _checked_denominator(pp, delta_s)
    rot = np.exp(1j * params.phi_rad) / math.cos(params.phi_rad)
    out = 1.0 - params.coupling_fraction * rot * _signal_numerator(pp, delta_s) / (2.0 * den)
    return complex(out) if np.ndim(out) == 0 else out


def gain_db(g):
    return 20.0 * np.log10(np.abs(g))


@dataclass
class GainTable:
    """Forward gain over a (xi, delta) grid, rows ordered xi-major.

    ``at_pole`` marks points on the oscillation pole, where ``gain`` is NaN.
    """

    xi: np.ndarray
    delta: np.ndarray
    gain: np.ndarray
    at_pole: np.ndarray
    delta_s: float

    @property
    def gain_db(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return gain_db(self.gain)

    def rows(self):
        for x, d, g, db in zip(self.xi, self.delta, self.gain, self.gain_db):
            yield {"xi": x, "delta": d, "re_gain": g.real, "im_gain": g.imag, "gain_db": db}

    def block(self, xi_value):
        """(delta, gain) for one pump drive."""
        m = self.xi == xi_value
        return self.delta[m], self.gain[m]


def gain_sweep(params: ResonatorParams, xi_list, delta_grid, delta_s: float, sweep_direction="up") -> GainTable:
    """Forward signal gain versus pump detuning at each pump drive.

    Pole points are reported in ``at_pole`` instead of raising.
    """
    xs, ds, gs, poles = [], [], [], []
    grid = np.asarray(delta_grid, dtype=float)
    for xi in np.asarray(xi_list, dtype=float):
        for d in grid:
            pp = pump_point(params, d, xi, sweep_direction)
            try:
                g = gain_forward(params, pp, delta_s)
                pole = False
            except ParametricThresholdError:
                g, pole = complex(np.nan, np.nan), True
            xs.append(xi)
            ds.append(d)
            gs.append(g)
            poles.append(pole)
    return GainTable(np.array(xs), np.array(ds), np.array(gs, dtype=complex), np.array(poles), float(delta_s))


def forward_efficiency_db(params: ResonatorParams, pp: PumpPoint, delta_s: float) -> float:
    """Forward gain relative to the pump-off response at the same signal frequency."""
    lp, lm = eigenrates(pp.delta_p, 0.0, 0.0)
    off = PumpPoint(pp.delta_p, 0.0, 0.0, complex(lp), complex(lm), 0j, pp.coupling, pp.phi_rad)
    return float(gain_db(gain_forward(params, pp, delta_s)) - gain_db(gain_forward(params, off, delta_s)))
