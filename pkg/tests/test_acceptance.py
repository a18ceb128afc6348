"""Acceptance suite: one check per criterion, each with its runtime budget.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import filecmp
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402

from kerrkit import cli  # noqa: E402
from kerrkit.bcs import BcsParams, mattis_bardeen, q_total, zero_temperature_sigma2  # noqa: E402
from kerrkit.fitting import fit_kerr_from_shift, fit_linear_trace, fit_nonlinear_trace, fit_qi_vs_temperature  # noqa: E402
from kerrkit.losses import KerrGeometry, fit_power_law, kerr_scaling  # noqa: E402
from kerrkit.materials import fit_universal, load_films  # noqa: E402
from kerrkit.mixing import gain_forward, gain_one_port, gain_sweep, pump_point  # noqa: E402
from kerrkit.resonator import (  # noqa: E402
    XI_CRIT,
    ComplexTrace,
    DriveCondition,
    ResonatorParams,
    bifurcation_threshold,
    frequency_grid,
    gamma_reflection,
    photon_roots,
    power_for_xi,
    reduced_detuning,
    resonance_shift,
    s21_linear,
    s21_nonlinear,
    scattering_matrix,
    simulate_trace,
)
from kerrkit.synth import add_noise  # noqa: E402

FILM_TABLE = Path(__file__).resolve().parents[1] / "src" / "kerrkit" / "data" / "nbn_films.csv"

# results collected for the terminal summary: name -> (passed, detail, seconds)
RESULTS: dict[str, tuple[bool, str, float]] = {}


def _random_params(rng, lossless=False, kerr=True):
    f0 = rng.uniform(1e9, 2e11)
    kappa = f0 / rng.uniform(1e2, 1e6)
    gamma = 0.0 if lossless else kappa * rng.uniform(0.0, 10.0)
    phi = rng.uniform(-1.2, 1.2)
    k = -rng.uniform(1.0, 1e4) if kerr else 0.0
    return ResonatorParams(f0, kappa, gamma, phi, k)


# --------------------------------------------------------------------------
# criteria


def crit_bifurcation_threshold():
    exact = 2.0 / math.sqrt(27.0)
    found = abs(bifurcation_threshold())
    err = abs(found - exact)
    return err < 1e-9, f"|xi_crit| = {found:.15f}, error {err:.1e}"


def crit_photon_ceiling():
    worst = 0.0
    for xi in (-0.1, -0.3, XI_CRIT, -0.5, -1.0, -3.0, 0.3, 1.0):
        delta = np.linspace(-5.0, 5.0, 100_000)
        n, _ = photon_roots(delta, np.full_like(delta, xi))
        worst = max(worst, float(np.nanmax(n)))
    # nested grids approach the maximum n = 2 at delta = xi n = 2 xi, which lies off-grid
    xi = -0.3 * math.sqrt(2.0)
    gaps = []
    for pts in (101, 1001, 10_001, 100_001, 1_000_001):
        delta = np.linspace(-5.0, 5.0, pts)
        n, _ = photon_roots(delta, np.full_like(delta, xi))
        gaps.append(2.0 - float(np.nanmax(n)))
    converging = all(b <= a for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 1e-8 and gaps[-1] < gaps[0]
    ok = worst <= 2.0 + 1e-9 and converging
    return ok, f"max n = {worst:.12f}; 2 - max(n) on refining grids {', '.join(f'{g:.1e}' for g in gaps)}"


def crit_linear_limit():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10_000):
        p = _random_params(rng)
        f = p.f0_hz + rng.uniform(-5, 5) * p.linewidth_hz
        drive = DriveCondition(power_for_xi(p, -1e-10, f), f)
        worst = max(worst, abs(s21_nonlinear(p, drive) - s21_linear(p, f)))
    return worst < 1e-8, f"max |difference| = {worst:.1e}"


def crit_unitarity():
    rng = np.random.default_rng(4)
    worst_g = worst_s = 0.0
    eye = np.eye(2)
    for _ in range(10_000):
        p = _random_params(rng, lossless=True)
        f = p.f0_hz + rng.uniform(-5, 5) * p.linewidth_hz
        xi = rng.uniform(-1.0, 0.0)
        drive = DriveCondition(power_for_xi(p, xi, f), f)
        g = complex(gamma_reflection(p, drive, rng.choice(["up", "down"])))
        s = scattering_matrix(g, p.phi_rad)
        worst_g = max(worst_g, abs(abs(g) - 1.0))
        worst_s = max(worst_s, float(np.max(np.abs(s.conj().T @ s - eye))))
    ok = worst_g < 1e-12 and worst_s < 1e-12
    return ok, f"max ||Gamma|-1| = {worst_g:.1e}, max |S^H S - 1| = {worst_s:.1e}"


def crit_pump_off():
    rng = np.random.default_rng(5)
    worst_1 = worst_2 = 0.0
    for _ in range(10_000):
        p = _random_params(rng, kerr=False)
        f_p = p.f0_hz + rng.uniform(-5, 5) * p.linewidth_hz
        f_s = f_p + rng.uniform(-5, 5) * p.linewidth_hz
        delta_p = float(reduced_detuning(p, f_p))
        delta_s = (f_s - f_p) / p.linewidth_hz
        pp = pump_point(p, delta_p, 0.0)
        g_ref = complex(gamma_reflection(p, DriveCondition(0.0, f_s)))
        worst_1 = max(worst_1, abs(gain_one_port(pp, delta_s) - g_ref))
        worst_2 = max(worst_2, abs(gain_forward(p, pp, delta_s) - complex(s21_linear(p, f_s))))
    ok = worst_1 < 1e-12 and worst_2 < 1e-12
    return ok, f"one-port vs Gamma {worst_1:.1e}, forward vs linear S21 {worst_2:.1e}"


def crit_symplectic():
    rng = np.random.default_rng(6)
    p = ResonatorParams(10e9, 1e6, 0.0, 0.0, -1.0)
    worst, done = 0.0, 0
    while done < 1000:
        xi = rng.uniform(0.999 * XI_CRIT, 0.0)
        delta = rng.uniform(-3.0, 3.0)
        delta_s = rng.uniform(-3.0, 3.0)
        pp = pump_point(p, delta, xi)
        if abs((1j * delta_s + pp.lambda_plus) * (1j * delta_s + pp.lambda_minus)) < 1e-6:
            continue
        g_s = gain_one_port(pp, delta_s)
        _, g_i = oracles.linear_response(delta, xi, delta_s, 1.0)
        worst = max(worst, abs(abs(g_s) ** 2 - abs(g_i) ** 2 - 1.0))
        done += 1
    return worst < 1e-9, f"max ||g_s|^2 - |g_i|^2 - 1| = {worst:.1e} over {done} draws"


def crit_gain_capability():
    # high-bandwidth device: kappa/2pi = 20 MHz, gamma/kappa = 0.1, signal 450 kHz above the pump
    p = ResonatorParams(95.1e9, 20e6, 2e6, 0.0, -1210.0)
    delta_s = 450e3 / p.linewidth_hz
    xis = np.linspace(-0.05, 0.999 * XI_CRIT, 40)
    table = gain_sweep(p, xis, np.linspace(-3.0, 0.5, 701), delta_s)
    db = np.where(table.at_pole, -np.inf, table.gain_db)
    i = int(np.nanargmax(db))
    ok = db[i] >= 16.0 and abs(table.xi[i]) < abs(XI_CRIT)
    return ok, f"max forward gain {db[i]:.1f} dB at xi = {table.xi[i]:.3f}, delta = {table.delta[i]:.3f}"


def crit_fit_round_trips():
    p = ResonatorParams.from_quality(95.1e9, 2e4, 2.901e4, 0.3, -1210.0)
    details, ok = [], True

    # (a) noiseless and noisy linear fits
    f = frequency_grid(p, 10, 1001)
    r = fit_linear_trace(simulate_trace(p, f)).params
    rel = max(
        abs(r["f0_hz"] / p.f0_hz - 1),
        abs(r["q_loaded"] / p.q_loaded - 1),
        abs(r["qe_star"] / p.qe_star - 1),
        abs(r["phi_rad"] / p.phi_rad - 1),
    )
    ok &= rel < 1e-6
    details.append(f"(a) noiseless max rel error {rel:.1e}")
    f = frequency_grid(p, 8, 4001)
    clean = simulate_trace(p, f)
    rng = np.random.default_rng(8)
    errs = [
        abs(fit_linear_trace(ComplexTrace(f, add_noise(clean.s21, 20.0, rng))).params["qi"] / p.qi - 1)
        for _ in range(200)
    ]
    med = float(np.median(errs))
    ok &= med < 0.02
    details.append(f"20 dB SNR median Qi error {100 * med:.2f}%")

    # (b) power ladder through the bistable regime
    f = frequency_grid(p, 10, 1001)
    low = fit_linear_trace(simulate_trace(p, f))
    xis = -np.array([0.05, 0.2, 0.35, 1.05 * abs(XI_CRIT), 0.6])
    ladder = []
    for pw in power_for_xi(p, xis):
        tr = simulate_trace(p, f, pw)
        tr.s21 = add_noise(tr.s21, 30.0, rng)
        ladder.append(tr)
    k = fit_nonlinear_trace(ladder, low).params["kerr_hz"]
    err_k = abs(k / p.kerr_hz - 1)
    ok &= err_k < 0.05
    details.append(f"(b) K = {k:.1f} Hz ({100 * err_k:.2f}%)")

    # (c) exact frequency-shift data
    n_ph = np.geomspace(10, 1e4, 12)
    pts = np.column_stack([n_ph, p.f0_hz + resonance_shift(p, n_ph)])
    slope = fit_kerr_from_shift(pts, p.f0_hz).params["kerr_hz"]
    slope_free = fit_kerr_from_shift(pts).params["kerr_hz"]
    err_c = max(abs(slope + 1210.0), abs(slope_free + 1210.0))
    ok &= err_c < 1e-6
    details.append(f"(c) slope {slope:.9f} Hz, free-f0 slope {slope_free:.6f} Hz")
    return ok, "; ".join(details)


def crit_kerr_scaling():
    rng = np.random.default_rng(9)
    widths = np.geomspace(50e-9, 2e-6, 25)
    ks = []
    for w in widths:
        g = KerrGeometry(w, 20e-9, 1e10, 2e-11, 2 * math.pi * 95.1e9)
        ks.append(kerr_scaling(g) * math.exp(rng.normal(0.0, 0.1)))
    slope, _, stderr = fit_power_law(widths, ks)
    return abs(slope + 2.0) <= 0.1, f"exponent {slope:.3f} +/- {stderr:.3f}"


def crit_bcs():
    tc = 13.5
    details, ok = [], True
    s = mattis_bardeen(0.01 * tc, 5e9, tc)
    lim = s.sigma2_over_n / zero_temperature_sigma2(5e9, tc) - 1
    ok &= abs(lim) < 0.01
    details.append(f"sigma2 low-T limit off by {abs(lim):.1e}")

    bp = BcsParams(tc, 0.9, 3e4, 95.1e9)
    q_ref = q_total(0.01 * tc, bp)
    cold = [q_total(t * tc, bp) for t in np.linspace(0.01, 0.15, 15)]
    spread = max(abs(q / q_ref - 1) for q in cold)
    warm = q_total(0.3 * tc, bp) / q_ref
    ok &= spread < 0.02 and warm < 0.5
    details.append(f"Qi spread below 0.15 Tc {100 * spread:.2f}%, Qi(0.3 Tc)/Qi(0) = {warm:.3f}")

    temps = np.linspace(0.1, 0.45, 8) * tc
    r = fit_qi_vs_temperature([(t, q_total(t, bp)) for t in temps], bp.f0_hz).params
    e_a, e_t = abs(r["alpha"] / 0.9 - 1), abs(r["tc_k"] / tc - 1)
    ok &= e_a < 0.01 and e_t < 0.01
    details.append(f"round trip alpha error {e_a:.1e}, Tc error {e_t:.1e}")
    return ok, "; ".join(details)


def crit_universal_fit():
    fit = fit_universal(load_films(FILM_TABLE))
    ok = abs(fit.a_coeff - 6487) <= 1607 and abs(fit.b_exp - 0.647) <= 0.05
    return ok, f"A = {fit.a_coeff:.0f} +/- {fit.a_err:.0f}, B = {fit.b_exp:.3f} +/- {fit.b_err:.3f}"


def _pipeline(root: Path, seed: int):
    traces = root / "traces"
    steps = [
        ["synth", "--output", str(traces), "--power-dbm=-120,-85,-80,-77,-75", "--snr-db", "30"],
        ["fit", "--kind", "trace", "--output", str(root / "fit.json")]
        + sum((["--input", str(traces / f"trace_{i:03d}.csv")] for i in range(5)), []),
        ["gain", "--output", str(root / "gain.csv"), "--delta-points", "51"],
        ["bcs", "--output", str(root / "bcs.csv"), "--t-points", "12"],
        ["material", "--output", str(root / "material.csv")],
    ]
    for argv in steps:
        code = cli.main(argv[:1] + ["--seed", str(seed)] + argv[1:])
        if code != 0:
            raise RuntimeError(f"kerrkit {' '.join(argv)} exited with {code}")


def crit_determinism():
    with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
        a, b = Path(d1), Path(d2)
        _pipeline(a, 7)
        _pipeline(b, 7)
        files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
        same = [filecmp.cmp(a / f, b / f, shallow=False) for f in files]
        other = Path(d1) / "other"
        other.mkdir()
        _pipeline(other, 8)
        differs = not filecmp.cmp(a / "traces" / "trace_000.csv", other / "traces" / "trace_000.csv", shallow=False)
    ok = len(files) >= 8 and all(same) and differs
    return ok, f"{sum(same)}/{len(files)} files byte-identical; different seed changes output: {differs}"


CRITERIA = [
    ("1 bifurcation threshold", crit_bifurcation_threshold, 1.0),
    ("2 photon-number ceiling", crit_photon_ceiling, 5.0),
    ("3 linear-limit equivalence", crit_linear_limit, 10.0),
    ("4 lossless unitarity", crit_unitarity, 5.0),
    ("5 pump-off gain reduction", crit_pump_off, 10.0),
    ("6 symplectic amplifier identity", crit_symplectic, 10.0),
    ("7 gain capability", crit_gain_capability, 30.0),
    ("8 fit round-trips", crit_fit_round_trips, 120.0),
    ("9 Kerr scaling law", crit_kerr_scaling, 5.0),
    ("10 BCS suite", crit_bcs, 60.0),
    ("11 universal-relation fit", crit_universal_fit, 1.0),
    ("12 determinism", crit_determinism, 30.0),
]


def evaluate(name, func, limit):
    t0 = time.perf_counter()
    try:
        ok, detail = func()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    if elapsed > limit:
        ok = False
        detail += f"; runtime {elapsed:.2f} s exceeds {limit:g} s"
    RESULTS[name] = (bool(ok), detail, elapsed)
    return bool(ok), detail, elapsed


def format_line(name, ok, detail, elapsed):
    return f"{'PASS' if ok else 'FAIL'}  criterion {name} ({elapsed:.2f} s): {detail}"


@pytest.mark.parametrize("name,func,limit", CRITERIA, ids=[c[0].split(" ", 1)[1].replace(" ", "_") for c in CRITERIA])
def test_criterion(name, func, limit):
    ok, detail, elapsed = evaluate(name, func, limit)
    assert ok, format_line(name, ok, detail, elapsed)


def test_oracle_agrees_on_threshold():
    # independent high-precision bisection on the root count
    onset = oracles.mp_bifurcation_onset()
    assert abs(onset - abs(XI_CRIT)) < 1e-9
    assert abs(onset - abs(bifurcation_threshold())) < 1e-9


def main() -> int:
    failed = 0
    for name, func, limit in CRITERIA:
        ok, detail, elapsed = evaluate(name, func, limit)
        print(format_line(name, ok, detail, elapsed), flush=True)
        failed += not ok
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
