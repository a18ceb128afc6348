import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrkit.errors import DomainError, FitError, TraceFormatError
from kerrkit.materials import (
    NBN_UNIVERSAL,
    FilmProperties,
    UniversalFit,
    fit_universal,
    film_table,
    gap_energy,
    load_films,
    sheet_inductance,
    sheet_inductance_from,
    universal_tc,
)

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "kerrkit" / "data" / "nbn_films.csv"

# CODATA 2018, written out independently of the package constants
HBAR = 1.054571817e-34
K_B = 1.380649e-23


def test_gap_energy():
    assert gap_energy(10.0) == pytest.approx(2.08 * K_B * 10.0, rel=1e-15)
    with pytest.raises(DomainError):
        gap_energy(0.0)


def test_sheet_inductance_inverts_to_thinnest_film_value():
    tc = 8.7
    r_sq = 2.12e-10 * math.pi * 2.08 * K_B * tc / HBAR
    assert sheet_inductance_from(r_sq, tc) == pytest.approx(2.12e-10, rel=1e-12)


def test_sheet_inductance_hand_evaluated_fixture_film():
    film = next(f for f in load_films(FIXTURE) if abs(f.thickness_nm - 27.9) < 1e-9)
    r_sq = film.rho_n / 27.9e-9
    expected = HBAR * r_sq / (math.pi * 2.08 * K_B * film.tc_k)
    assert sheet_inductance(film) == pytest.approx(expected, rel=1e-12)
    assert film.l_sq == pytest.approx(expected, rel=1e-12)


@given(st.floats(1.0, 1e4), st.floats(0.5, 20.0), st.floats(0.1, 10.0))
def test_sheet_inductance_homogeneity(r_sq, tc, scale):
    base = sheet_inductance_from(r_sq, tc)
    assert sheet_inductance_from(scale * r_sq, tc) == pytest.approx(scale * base, rel=1e-12)
    assert sheet_inductance_from(r_sq, scale * tc) == pytest.approx(base / scale, rel=1e-12)


def test_film_validation():
    with pytest.raises(DomainError):
        FilmProperties(0.0, 10.0, 1e-6)
    with pytest.raises(DomainError):
        FilmProperties(10e-9, -1.0, 1e-6)


def test_universal_tc_examples():
    assert universal_tc(100.0) == pytest.approx(6487 * 100 ** -0.647, rel=1e-12)
    flat = UniversalFit(500.0, 0.0)
    assert universal_tc(10.0, flat) == universal_tc(1e4, flat) == 500.0


@given(st.floats(1.0, 1e4), st.floats(1.01, 10.0))
def test_universal_tc_decreasing(r_sq, factor):
    assert universal_tc(r_sq * factor) < universal_tc(r_sq)


def _exact_points(a, b, r_sq):
    # split t*Tc between thickness (nm) and Tc arbitrarily
    points = []
    for i, r in enumerate(r_sq):
        product = a * r ** (-b)
        tc = 5.0 + i
        points.append((r, product / tc * 1e-9, tc))
    return points


def test_fit_universal_noiseless_round_trip():
    fit = fit_universal(_exact_points(6487.0, 0.647, np.geomspace(50, 2000, 7)))
    assert fit.a_coeff == pytest.approx(6487.0, rel=1e-6)
    assert fit.b_exp == pytest.approx(0.647, rel=1e-6)


def test_fit_universal_noise_monte_carlo():
    rng = np.random.default_rng(11)
    r_sq = np.geomspace(50, 2000, 8)
    bs, errs = [], []
    for _ in range(100):
        pts = [(r, t * math.exp(rng.normal(0, 0.05)), tc) for r, t, tc in _exact_points(6487.0, 0.647, r_sq)]
        fit = fit_universal(pts)
        bs.append(fit.b_exp)
        errs.append(fit.b_err)
    # mean of 100 trials is within 2 standard errors of the truth
    assert abs(np.mean(bs) - 0.647) < 2 * np.std(bs) / math.sqrt(len(bs))
    # reported sigma matches the empirical spread
    assert np.median(errs) == pytest.approx(np.std(bs), rel=0.3)


def test_fit_universal_errors():
    with pytest.raises(FitError):
        fit_universal([(100.0, 1e-8, 10.0)] * 2)
    with pytest.raises(FitError):
        fit_universal([(100.0, 1e-8, 10.0), (100.0, 2e-8, 10.0), (100.0, 3e-8, 9.0)])


def test_fixture_table_fit():
    fit = fit_universal(load_films(FIXTURE))
    assert abs(fit.a_coeff - NBN_UNIVERSAL.a_coeff) <= NBN_UNIVERSAL.a_err
    assert abs(fit.b_exp - NBN_UNIVERSAL.b_exp) <= NBN_UNIVERSAL.b_err


def test_fixture_matches_reported_films():
    films = load_films(FIXTURE)
    assert len(films) == 6
    thinnest = min(films, key=lambda f: f.thickness_m)
    assert thinnest.thickness_nm == pytest.approx(7.0)
    assert thinnest.tc_k == pytest.approx(8.7)
    assert max(f.tc_k for f in films) == pytest.approx(13.9)
    # the thinnest film has the largest kinetic inductance, of order 200 pH/sq
    assert 1.5e-10 < thinnest.l_sq < 2.5e-10
    rows = film_table(films)
    assert rows[0]["l_sq_ph"] == pytest.approx(films[0].l_sq * 1e12)


def test_load_films_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("thickness_nm,tc_k\n10,5\n")
    with pytest.raises(TraceFormatError, match="rho_n_ohm_m"):
        load_films(p)
    p.write_text("thickness_nm,tc_k,rho_n_ohm_m\n10,5,abc\n")
    with pytest.raises(TraceFormatError, match=":2:"):
        load_films(p)
