"""Thin-film material properties.

Sheet resistance, kinetic sheet inductance and superconducting gap of a
disordered film, plus the universal power law linking thickness, critical
temperature and sheet resistance,

    t * Tc = A * R_sq ** (-B)

with ``t`` in nanometres, ``Tc`` in kelvin and ``R_sq`` in ohm per square.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from .constants import GAP_RATIO, HBAR, K_B
from .errors import DomainError, FitError, TraceFormatError

FILM_COLUMNS = ("thickness_nm", "tc_k", "rho_n_ohm_m")


def gap_energy(tc_k: float) -> float:
    """Zero-temperature gap ``2.08 kB Tc`` in joules."""
    if not tc_k > 0:
        raise DomainError(f"tc_k must be positive, got {tc_k!r}")
    return GAP_RATIO * K_B * tc_k


@dataclass(frozen=True)
class FilmProperties:
    """A superconducting film characterised by DC transport.

    Parameters
    ----------
    thickness_m : float
        Film thickness in metres.
    tc_k : float
        Critical temperature in kelvin.
    rho_n : float
        Normal-state resistivity just above ``Tc`` in ohm metres.
    """

    thickness_m: float
    tc_k: float
    rho_n: float

    def __post_init__(self):
        for name in ("thickness_m", "tc_k", "rho_n"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def r_sq(self) -> float:
        """Normal sheet resistance in ohm per square."""
        return self.rho_n / self.thickness_m

    @property
    def delta0_j(self) -> float:
        return gap_energy(self.tc_k)

    @property
    def l_sq(self) -> float:
        """Kinetic sheet inductance in henry per square."""
        return sheet_inductance(self)

    @property
    def thickness_nm(self) -> float:
        return self.thickness_m * 1e9


@dataclass(frozen=True)
class UniversalFit:
    a_coeff: float
    b_exp: float
    a_err: float = 0.0
    b_err: float = 0.0

    def __post_init__(self):
        if not self.a_coeff > 0:
            raise DomainError(f"a_coeff must be positive, got {self.a_coeff!r}")
        if not 0 <= self.b_exp < 2:
            raise DomainError(f"b_exp must lie in [0, 2), got {self.b_exp!r}")


#: Fitted values quoted for ALD NbN (t in nm, Tc in K, R_sq in ohm/sq).
NBN_UNIVERSAL = UniversalFit(a_coeff=6487.0, b_exp=0.647, a_err=1607.0, b_err=0.05)


def sheet_inductance(film: FilmProperties) -> float:
    """Kinetic sheet inductance ``hbar R_sq / (pi Delta0)`` in H/sq."""
    return sheet_inductance_from(film.r_sq, film.tc_k)


def sheet_inductance_from(r_sq: float, tc_k: float) -> float:
    if not r_sq > 0:
        raise DomainError(f"r_sq must be positive, got {r_sq!r}")
    return HBAR * r_sq / (math.pi * gap_energy(tc_k))


def universal_tc(r_sq, fit: UniversalFit = NBN_UNIVERSAL):
    """Product ``t * Tc`` (nm K) predicted by the universal relation."""
    r = np.asarray(r_sq, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r_sq must be positive")
    out = fit.a_coeff * r ** (-fit.b_exp)
    return float(out) if out.ndim == 0 else out


def fit_universal(points: Iterable) -> UniversalFit:
    """Fit ``t Tc = A R_sq^-B`` by linear regression in log-log space.

    ``points`` holds either :class:`FilmProperties` or ``(r_sq, thickness_m,
    tc_k)`` tuples. Thickness enters the fit in nanometres.
    """
    rows = []
    for p in points:
        if isinstance(p, FilmProperties):
            rows.append((p.r_sq, p.thickness_m, p.tc_k))
        else:
            rows.append(tuple(float(v) for v in p))
    if len(rows) < 3:
        raise FitError(f"need at least 3 films, got {len(rows)}")
    data = np.array(rows, dtype=float)
    if np.any(data <= 0) or not np.all(np.isfinite(data)):
        raise FitError("all film values must be positive and finite")
    x = np.log(data[:, 0])
    if np.ptp(x) == 0:
        raise FitError("sheet resistances are all identical; slope undefined")
    y = np.log(data[:, 1] * 1e9 * data[:, 2])
    reg = stats.linregress(x, y)
    a = math.exp(reg.intercept)
    # stderr is zero on exact data; keep it that way rather than NaN
    return UniversalFit(
        a_coeff=a,
        b_exp=-reg.slope,
        a_err=a * reg.intercept_stderr,
        b_err=reg.stderr,
    )


def load_films(path) -> list[FilmProperties]:
    """Read a ``thickness_nm,tc_k,rho_n_ohm_m`` fixture table."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise TraceFormatError(f"{path}: empty file")
        missing = [c for c in FILM_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise TraceFormatError(f"{path}: missing column(s) {', '.join(missing)}")
        films = []
        for lineno, row in enumerate(reader, start=2):
            try:
                t_nm, tc, rho = (float(row[c]) for c in FILM_COLUMNS)
            except (TypeError, ValueError) as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from None
            try:
                films.append(FilmProperties(t_nm * 1e-9, tc, rho))
            except DomainError as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from None
    return films


def film_table(films: Sequence[FilmProperties]) -> list[dict]:
    """Derived quantities per film, ready for CSV emission."""
    return [
        {
            "thickness_nm": f.thickness_nm,
            "tc_k": f.tc_k,
            "rho_n_ohm_m": f.rho_n,
            "r_sq_ohm": f.r_sq,
            "l_sq_ph": f.l_sq * 1e12,
            "t_tc_nm_k": f.thickness_nm * f.tc_k,
        }
        for f in films
    ]
