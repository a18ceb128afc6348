import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from kerrkit.errors import ParametricThresholdError
from kerrkit.mixing import (
    eigenrates,
    forward_efficiency_db,
    gain_forward,
    gain_idler,
    gain_one_port,
    gain_sweep,
    pump_point,
)
from kerrkit.resonator import XI_CRIT, DriveCondition, ResonatorParams, gamma_reflection, s21_linear

LOSSLESS = ResonatorParams(10e9, 1e6, 0.0, 0.0, -1.0)
DEVICE = ResonatorParams(95.1e9, 20e6, 2e6, 0.0, -1210.0)

deltas = st.floats(-3, 3)
subcritical = st.floats(0.995 * XI_CRIT, 0.0)


def test_pump_off_eigenrates():
    pp = pump_point(LOSSLESS, -0.7, 0.0)
    assert pp.lambda_plus == pytest.approx(0.5 + 0.7j, abs=1e-15)
    assert pp.lambda_minus == pytest.approx(0.5 - 0.7j, abs=1e-15)


def test_real_splitting_on_shifted_resonance():
    xi, n = -0.3, 0.9
    lp, lm = eigenrates(2 * xi * n, xi, n)
    assert lp == pytest.approx(0.5 + abs(xi * n), abs=1e-15)
    assert lm == pytest.approx(0.5 - abs(xi * n), abs=1e-15)


@given(deltas, st.floats(-2, 2), st.floats(0, 2))
def test_eigenrate_identities(delta, xi, n):
    lp, lm = eigenrates(delta, xi, n)
    assert abs(lp + lm - 1) < 1e-12
    expected = 0.25 - ((xi * n) ** 2 - (delta - 2 * xi * n) ** 2)
    assert abs(lp * lm - expected) < 1e-12 * max(1.0, abs(expected))


@given(deltas, deltas, st.floats(0, 5), st.floats(-1, 1))
def test_pump_off_reductions(delta, delta_s, loss, phi):
    p = ResonatorParams(10e9, 1e6, loss * 1e6, phi, 0.0)
    pp = pump_point(p, delta, 0.0)
    f_s = p.f0_hz + (delta + delta_s) * p.linewidth_hz
    ref = complex(gamma_reflection(p, DriveCondition(0.0, f_s)))
    assert abs(gain_one_port(pp, delta_s) - ref) < 1e-9
    assert abs(gain_forward(p, pp, delta_s) - complex(s21_linear(p, f_s))) < 1e-9
    assert gain_idler(pp, delta_s) == 0


@given(subcritical, deltas, deltas)
def test_idler_matches_brute_force_oracle(xi, delta, delta_s):
    pp = pump_point(LOSSLESS, delta, xi)
    g_s_ref, g_i_ref = oracles.linear_response(delta, xi, delta_s, 1.0)
    assert abs(gain_one_port(pp, delta_s) - g_s_ref) < 1e-9 * max(1, abs(g_s_ref))
    assert abs(gain_idler(pp, delta_s) - g_i_ref) < 1e-9 * max(1, abs(g_i_ref))


@given(subcritical, deltas, deltas)
def test_finite_difference_linearization(xi, delta, delta_s):
    g_s_ref, _ = oracles.linear_response(delta, xi, delta_s, 1.0, h=1e-6)
    g_s = gain_one_port(pump_point(LOSSLESS, delta, xi), delta_s)
    assert abs(g_s - g_s_ref) < 1e-6 * max(1, abs(g_s))


@given(subcritical, deltas, deltas)
def test_lossless_symplectic(xi, delta, delta_s):
    pp = pump_point(LOSSLESS, delta, xi)
    g_s, g_i = gain_one_port(pp, delta_s), gain_idler(pp, delta_s)
    assert abs(abs(g_s) ** 2 - abs(g_i) ** 2 - 1) < 1e-9 * max(1, abs(g_s) ** 2)


@given(subcritical, deltas, deltas, st.floats(0.01, 5))
def test_loss_degrades_identity(xi, delta, delta_s, loss):
    p = ResonatorParams(10e9, 1e6, loss * 1e6, 0.0, -1.0)
    pp = pump_point(p, delta, xi)
    g_s, g_i = gain_one_port(pp, delta_s), gain_idler(pp, delta_s)
    assert abs(g_s) ** 2 - abs(g_i) ** 2 < 1


def test_gain_diverges_towards_threshold():
    gains = []
    for frac in (0.9, 0.99, 0.999, 0.9999):
        xi = frac * XI_CRIT
        best = max(abs(gain_one_port(pump_point(LOSSLESS, d, xi), 0.0)) for d in np.linspace(-1.5, 0.0, 3001))
        gains.append(best)
    assert np.all(np.diff(gains) > 0)
    assert gains[-1] > 30


def test_pole_raises():
    # delta = 2 xi n with xi n = 1/2 puts lambda_minus at zero
    xi, n = -0.5, 1.0
    pp = pump_point(LOSSLESS, 0.0, 0.0)
    lp, lm = eigenrates(2 * xi * n, xi, n)
    pole = type(pp)(2 * xi * n, xi, n, complex(lp), complex(lm), 0j, 1.0, 0.0)
    with pytest.raises(ParametricThresholdError):
        gain_one_port(pole, 0.0)
    with pytest.raises(ParametricThresholdError):
        gain_idler(pole, 0.0)
    with pytest.raises(ParametricThresholdError):
        gain_forward(LOSSLESS, pole, 0.0)


def test_sweep_layout_and_pump_off_row():
    grid = np.linspace(-2, 1, 31)
    table = gain_sweep(DEVICE, [0.0, -0.2], grid, 0.1)
    assert table.xi.tolist() == [0.0] * 31 + [-0.2] * 31
    d, g = table.block(0.0)
    f_s = DEVICE.f0_hz + (d + 0.1) * DEVICE.linewidth_hz
    assert np.max(np.abs(g - s21_linear(DEVICE, f_s))) < 1e-12
    row = next(table.rows())
    assert list(row) == ["xi", "delta", "re_gain", "im_gain", "gain_db"]


def test_gain_peak_grows_and_narrows():
    delta_s = 450e3 / DEVICE.linewidth_hz
    grid = np.linspace(-2.5, 0.5, 3001)
    peaks, widths = [], []
    for xi in (-0.2, -0.3, -0.36, -0.38):
        table = gain_sweep(DEVICE, [xi], grid, delta_s)
        db = table.gain_db
        peaks.append(db.max())
        above = grid[db > db.max() - 3.0]
        widths.append(above.max() - above.min())
    assert np.all(np.diff(peaks) > 0)
    assert np.all(np.diff(widths) < 0)


def test_forward_efficiency_at_high_drive():
    delta_s = 450e3 / DEVICE.linewidth_hz
    best = max(
        forward_efficiency_db(DEVICE, pump_point(DEVICE, d, 0.999 * XI_CRIT), delta_s)
        for d in np.linspace(-1.5, 0.0, 601)
    )
    assert best > 16.0
