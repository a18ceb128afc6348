"""Synthetic traces for tests, demos and the command line."""

from __future__ import annotations

import math

import numpy as np

from .resonator import ComplexTrace, ResonatorParams, frequency_grid, simulate_trace

#: Seed used when neither a flag nor ``KERRKIT_SEED`` provides one.
DEFAULT_SEED = 20240611


def add_noise(s21, snr_db: float | None, rng: np.random.Generator):
    """Complex Gaussian noise of total variance ``10^(-snr_db/10)`` per point.

    The signal reference is the unit off-resonant baseline. ``None`` or an
    infinite SNR returns the input unchanged.
    """
    z = np.asarray(s21, dtype=complex)
    if snr_db is None or math.isinf(snr_db):
        return z.copy()
    sigma = math.sqrt(10.0 ** (-snr_db / 10.0) / 2.0)
    noise = rng.normal(0.0, sigma, z.shape) + 1j * rng.normal(0.0, sigma, z.shape)
    return z + noise


def synth_trace(
    params: ResonatorParams,
    powers_w,
    snr_db: float | None = None,
    seed: int = DEFAULT_SEED,
    f_hz=None,
    sweep_direction: str = "up",
    temperature_k: float = float("nan"),
) -> list[ComplexTrace]:
    """Noisy model traces, one per incident power.

    The frequency grid defaults to 1001 points over 10 linewidths around
    ``f0``. A single generator seeded with ``seed`` feeds every trace in
    order, so output is fully determined by the arguments.
    """
    f = frequency_grid(params) if f_hz is None else np.asarray(f_hz, dtype=float)
    rng = np.random.default_rng(seed)
    out = []
    for p in np.atleast_1d(np.asarray(powers_w, dtype=float)):
        tr = simulate_trace(params, f, float(p), sweep_direction, temperature_k)
        tr.s21 = add_noise(tr.s21, snr_db, rng)
        out.append(tr)
    return out
