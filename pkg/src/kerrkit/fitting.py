"""Recover device parameters from complex traces and summary data.

Every fit returns a :class:`FitResult`. Optimization is damped least squares
(Levenberg-Marquardt, or a bounded trust-region variant when parameters are
constrained) with finite-difference Jacobians, terminating on a relative
cost change below 1e-12 or after 200 iterations. Covariances are
``(J^T J)^-1`` at the optimum scaled by the residual variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage, optimize

from .bcs import BcsParams, mattis_bardeen
from .errors import DomainError, FitError, UnsupportedRegimeError
from .losses import TlsParams, qi_of_power
from .resonator import (
    XI_CRIT,
    ComplexTrace,
    ResonatorParams,
    branch_n,
    is_bifurcated,
    reduced_drive,
)

MAX_ITERATIONS = 200
TOLERANCE = 1e-12
PLATEAU_FRACTION = 0.10


@dataclass
class FitResult:
    """Outcome of a fit.

    ``params`` and ``sigma`` are keyed by parameter name; per-trace quantities
    of a power-ladder fit are lists. ``covariance`` is ordered as
    ``param_names``.
    """

    kind: str
    params: dict
    sigma: dict
    covariance: np.ndarray
    param_names: list
    residual_rms: float
    n_iterations: int
    converged: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": _jsonable(self.params),
            "sigma": _jsonable(self.sigma),
            "residual_rms": float(self.residual_rms),
            "converged": bool(self.converged),
            "n_iterations": int(self.n_iterations),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FitResult":
        return cls(
            kind=data["kind"],
            params=dict(data["params"]),
            sigma=dict(data["sigma"]),
            covariance=np.empty((0, 0)),
            param_names=list(data["params"]),
            residual_rms=float(data["residual_rms"]),
            n_iterations=int(data["n_iterations"]),
            converged=bool(data["converged"]),
        )

    def resonator_params(self, kerr_hz: float | None = None) -> ResonatorParams:
        p = self.params
        k = p.get("kerr_hz", 0.0) if kerr_hz is None else kerr_hz
        return ResonatorParams(p["f0_hz"], p["kappa_hz"], p["gamma_hz"], p["phi_rad"], k)


def _jsonable(d):
    out = {}
    for k, v in d.items():
        if isinstance(v, np.ndarray):
            v = v.tolist()
        if isinstance(v, (list, tuple)):
            v = [_scalar(x) for x in v]
        else:
            v = _scalar(v)
        out[k] = v
    return out


def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def _solve(residuals, x0, bounds=None, x_scale=1.0):
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    kwargs = dict(ftol=TOLERANCE, xtol=TOLERANCE, gtol=TOLERANCE, x_scale=x_scale)
    if bounds is None:
        res = optimize.least_squares(residuals, x0, method="lm", max_nfev=MAX_ITERATIONS * (n + 1), **kwargs)
    else:
        res = optimize.least_squares(residuals, x0, method="trf", bounds=bounds, max_nfev=MAX_ITERATIONS, **kwargs)
    return res


def _covariance(res, n_params, jac=None):
    m = res.fun.size
    jac = np.atleast_2d(res.jac if jac is None else jac)
    dof = max(m - n_params, 1)
    s2 = float(res.fun @ res.fun) / dof
    cov = np.linalg.pinv(jac.T @ jac) * s2
    return 0.5 * (cov + cov.T)


def _smooth_jacobian(residuals, x, rel_step=1e-6):
    """Central-difference Jacobian with discontinuous rows zeroed.

    Near a branch jump a sample can switch branch under a small parameter
    step; there the forward and backward differences disagree by orders of
    magnitude. Such rows carry no local information and are dropped.
    """
    x = np.asarray(x, dtype=float)
    r0 = residuals(x)
    jac = np.empty((r0.size, x.size))
    bad = np.zeros(r0.size, dtype=bool)
    for j in range(x.size):
        h = rel_step * max(abs(x[j]), 1.0)
        e = np.zeros_like(x)
        e[j] = h
        fwd = (residuals(x + e) - r0) / h
        bwd = (r0 - residuals(x - e)) / h
        jac[:, j] = 0.5 * (fwd + bwd)
        bad |= np.abs(fwd - bwd) > 0.5 * (np.abs(fwd) + np.abs(bwd)) + 1e-3 * (1.0 + np.median(np.abs(fwd)))
    jac[bad] = 0.0
    return jac


def _iterations(res):
    return int(res.njev) if res.njev is not None else int(res.nfev)


def _rms_complex(res):
    # residual vector stacks real and imaginary parts
    return math.sqrt(2.0 * float(res.fun @ res.fun) / res.fun.size) if res.fun.size else 0.0


# --------------------------------------------------------------------------
# traces


def normalize_trace(trace: ComplexTrace, fraction: float = PLATEAU_FRACTION):
    """Divide a trace by the median magnitude of its outer ``fraction`` of points."""
    n = len(trace)
    k = max(1, int(round(0.5 * fraction * n)))
    edge = np.concatenate([trace.s21[:k], trace.s21[-k:]])
    scale = float(np.median(np.abs(edge)))
    if not scale > 0:
        raise FitError("off-resonant plateau has zero magnitude")
    return trace.s21 / scale, scale


def linear_model(f, f0, q, qe_star, phi, amp=1.0):
    return amp * (1.0 - (q / qe_star) * np.exp(1j * phi) / (1.0 + 2j * q * (f - f0) / f0))


def initial_guess_linear(f, z):
    """Heuristic starting point ``(f0, Q, Qe*, phi, amp)`` for a normalized trace.

    ``f0`` is where the resonant dip ``|1 - S21|`` peaks, ``Q`` comes from the
    half-power width of ``|1 - S21|^2`` and ``Qe*``, ``phi`` from the complex
    dip depth at ``f0``.
    """
    # light smoothing keeps the width estimate from stopping on a noise spike
    width = max(1, f.size // 200)
    zs = ndimage.uniform_filter1d(z.real, width, mode="nearest") + 1j * ndimage.uniform_filter1d(
        z.imag, width, mode="nearest"
    )
    dip = 1.0 - zs
    power = np.abs(dip) ** 2
    i0 = int(np.argmax(power))
    f0 = f[i0]
    half = 0.5 * power[i0]
    lo = i0
    while lo > 0 and power[lo - 1] >= half:
        lo -= 1
    hi = i0
    while hi < f.size - 1 and power[hi + 1] >= half:
        hi += 1
    df = np.median(np.diff(f))
    fwhm = max(f[hi] - f[lo], df)
    q = f0 / fwhm
    qe = q / max(abs(dip[i0]), 1e-6)
    phi = float(np.angle(dip[i0]))
    phi = float(np.clip(phi, -1.4, 1.4))
    return f0, q, qe, phi, 1.0


def fit_linear_trace(trace: ComplexTrace, min_points: int = 50, min_span_linewidths: float = 3.0) -> FitResult:
    """Fit the low-power lineshape ``(f0, Q, Qe*, phi)`` of one trace.

    ``Qi`` follows from ``1/Q = 1/Qi + cos(phi)/Qe*``. A real amplitude
    absorbs the overall baseline, so the fit is unchanged by rescaling the
    trace.
    """
    f = trace.freq_hz
    if len(trace) < min_points:
        raise FitError(f"trace has {len(trace)} points; need at least {min_points}")
    z, _ = normalize_trace(trace)
    f0g, qg, qeg, phig, ampg = initial_guess_linear(f, z)
    lw = f0g / qg
    if (f[-1] - f[0]) < min_span_linewidths * lw:
        raise FitError(
            f"trace spans {(f[-1] - f[0]) / lw:.2f} linewidths; need at least {min_span_linewidths}"
        )
    scale = np.array([lw, qg, qeg, 1.0, 1.0])
    offset = np.array([f0g, 0.0, 0.0, 0.0, 0.0])
    # detuning from the initial f0 is exact; subtracting two ~1e11 numbers
    # inside the model would cost precision in the Jacobian
    rel = f - f0g

    def unpack(u):
        return offset + u * scale

    def residuals(u):
        _, q, qe, phi, amp = unpack(u)
        f0 = f0g + u[0] * lw
        x = (rel - u[0] * lw) / f0
        r = amp * (1.0 - (q / qe) * np.exp(1j * phi) / (1.0 + 2j * q * x)) - z
        return np.concatenate([r.real, r.imag])

    u0 = np.array([0.0, 1.0, 1.0, phig, ampg])
    res = _solve(residuals, u0)
    f0, q, qe, phi, amp = unpack(res.x)
    cov_u = _covariance(res, 5)
    cov = cov_u * np.outer(scale, scale)
    sig = np.sqrt(np.clip(np.diag(cov), 0, None))

    inv_qi = 1.0 / q - math.cos(phi) / qe
    qi = math.inf if inv_qi <= 0 else 1.0 / inv_qi
    # d(qi)/d(q, qe, phi) for error propagation
    grad = np.array([0.0, qi**2 / q**2, -(qi**2) * math.cos(phi) / qe**2, -(qi**2) * math.sin(phi) / qe, 0.0])
    sig_qi = float(math.sqrt(max(grad @ cov @ grad, 0.0))) if math.isfinite(qi) else math.inf

    kappa = f0 * math.cos(phi) / qe
    gamma = f0 / qi if math.isfinite(qi) else 0.0
    params = {
        "f0_hz": f0,
        "q_loaded": q,
        "qe_star": qe,
        "phi_rad": phi,
        "amplitude": amp,
        "qi": qi,
        "kappa_hz": kappa,
        "gamma_hz": gamma,
    }
    sigma = {
        "f0_hz": sig[0],
        "q_loaded": sig[1],
        "qe_star": sig[2],
        "phi_rad": sig[3],
        "amplitude": sig[4],
        "qi": sig_qi,
    }
    return FitResult(
        "linear",
        params,
        sigma,
        cov,
        ["f0_hz", "q_loaded", "qe_star", "phi_rad", "amplitude"],
        _rms_complex(res),
        _iterations(res),
        bool(res.status > 0),
    )


def _kerr_per_xi(base: ResonatorParams, gamma_hz, p_in_w):
    """``K/2pi`` (Hz) per unit reduced drive evaluated at f0."""
    unit = reduced_drive(base.replace(gamma_hz=gamma_hz, kerr_hz=1.0), p_in_w, base.f0_hz)
    return 1.0 / float(unit)


def _nonlinear_model(f, rel, shift, kappa, phi, gamma, xi0, amp, direction):
    # rel = f - f_ref is precomputed; the fitted resonance is f_ref + shift
    total = kappa + gamma
    delta = (rel - shift) / total
    # reduced drive scales with photon flux P / (h f)
    xi = xi0 * (f - rel + shift) / f
    n = branch_n(delta, xi, direction)
    rot = np.exp(1j * phi) / math.cos(phi)
    return amp * (1.0 - (kappa / total) * rot / (1.0 + 2j * (delta - xi * n)))


def _scan_xi(f, rel, z, kappa, phi, gamma, direction, xi_max=1.5):
    """Grid search for the reduced drive, coarse then fine."""

    def cost(x):
        r = _nonlinear_model(f, rel, 0.0, kappa, phi, gamma, x, 1.0, direction) - z
        return float(np.sum(np.abs(r) ** 2))

    coarse = np.linspace(-xi_max, xi_max, 301)
    best = coarse[int(np.argmin([cost(x) for x in coarse]))]
    step = coarse[1] - coarse[0]
    fine = np.linspace(best - step, best + step, 101)
    return float(fine[int(np.argmin([cost(x) for x in fine]))])


def fit_nonlinear_trace(
    traces: Sequence[ComplexTrace],
    low_power: ResonatorParams | FitResult,
    free_linear: bool = False,
    significance: float = 3.0,
) -> FitResult:
    """Fit the reduced drive of each trace in a power ladder and infer ``K``.

    With ``free_linear=False`` the resonance frequency, external rate and
    mismatch angle stay at their low-power values; each trace gets its own
    reduced drive, internal loss rate and baseline amplitude. Traces whose
    reduced drive is significant are combined into an inverse-variance
    weighted Kerr estimate.

    Only the branch named by each trace's ``sweep_direction`` is compared.
    """
    base = low_power.resonator_params() if isinstance(low_power, FitResult) else low_power
    if not traces:
        raise FitError("no traces given")
    for t in traces:
        if not (t.p_in_w > 0 and math.isfinite(t.p_in_w)):
            raise FitError("every trace needs a positive incident power")
    data = []
    for t in traces:
        z, _ = normalize_trace(t)
        data.append((t.freq_hz, z, t.sweep_direction, t.p_in_w, t.freq_hz - base.f0_hz))

    n_tr = len(data)
    xi_init = [_scan_xi(f, rel, z, base.kappa_hz, base.phi_rad, base.gamma_hz, d) for f, z, d, _, rel in data]
    g_scale = max(base.gamma_hz, 1e-3 * base.kappa_hz)
    lw = base.linewidth_hz

    per_trace = []
    if not free_linear:
        for (f, z, d, _, rel), x0 in zip(data, xi_init):

            def residuals(u, f=f, z=z, d=d, rel=rel):
                r = _nonlinear_model(f, rel, 0.0, base.kappa_hz, base.phi_rad, u[1] * g_scale, u[0], u[2], d) - z
                return np.concatenate([r.real, r.imag])

            res = _solve(residuals, [x0, base.gamma_hz / g_scale, 1.0])
            jac = _smooth_jacobian(residuals, res.x)
            cov = _covariance(res, 3, jac) * np.outer([1, g_scale, 1], [1, g_scale, 1])
            per_trace.append((res.x[0], res.x[1] * g_scale, res.x[2], cov[:2, :2], res))
        shared = (base.f0_hz, base.kappa_hz, base.phi_rad)
        fun = np.concatenate([p[4].fun for p in per_trace])
        iterations = sum(_iterations(p[4]) for p in per_trace)
        converged = all(p[4].status > 0 for p in per_trace)
        cov_shared = None
        shared_sigma = {}
    else:
        # shared (f0, kappa, phi) plus (xi, gamma, amp) per trace
        k_scale = base.kappa_hz

        def unpack(u):
            shift = u[0] * lw
            kappa = u[1] * k_scale
            phi = u[2]
            rest = u[3:].reshape(n_tr, 3)
            return shift, kappa, phi, rest

        def residuals(u):
            shift, kappa, phi, rest = unpack(u)
            out = []
            for (f, z, d, _, rel), (xi, g, amp) in zip(data, rest):
                r = _nonlinear_model(f, rel, shift, kappa, phi, g * g_scale, xi, amp, d) - z
                out.extend([r.real, r.imag])
            return np.concatenate(out)

        u0 = [0.0, 1.0, base.phi_rad]
        for x0 in xi_init:
            u0 += [x0, base.gamma_hz / g_scale, 1.0]
        res = _solve(residuals, u0)
        shift, kappa, phi, rest = unpack(res.x)
        f0 = base.f0_hz + shift
        scale = np.concatenate([[lw, k_scale, 1.0], np.tile([1.0, g_scale, 1.0], n_tr)])
        cov_all = _covariance(res, res.x.size, _smooth_jacobian(residuals, res.x)) * np.outer(scale, scale)
        for j, (xi, g, amp) in enumerate(rest):
            idx = [3 + 3 * j, 4 + 3 * j]
            per_trace.append((xi, g * g_scale, amp, cov_all[np.ix_(idx, idx)], None))
        # (kappa, xi_j, gamma_j) rows of the full covariance, for the correlated combination
        keep = [1] + [i for j in range(n_tr) for i in (3 + 3 * j, 4 + 3 * j)]
        cov_shared = cov_all[np.ix_(keep, keep)]
        shared_sigma = dict(zip(("f0_hz", "kappa_hz", "phi_rad"), np.sqrt(np.clip(np.diag(cov_all)[:3], 0, None))))
        shared = (f0, kappa, phi)
        fun = res.fun
        iterations = _iterations(res)
        converged = bool(res.status > 0)

    f0, kappa, phi = shared
    ref = ResonatorParams(f0, kappa, base.gamma_hz, phi)
    xis, gammas, amps, kerrs, xi_sig, used = [], [], [], [], [], []
    # K = xi (kappa + gamma)^3 / (flux kappa) up to constants; gradient per trace
    # with respect to (kappa, xi_j, gamma_j)
    grad = np.zeros((n_tr, 1 + 2 * n_tr))
    for j, ((xi, gamma, amp, cov2, _), (_, _, _, p_in, _)) in enumerate(zip(per_trace, data)):
        gamma = max(gamma, 0.0)
        per_xi = _kerr_per_xi(ref, gamma, p_in)
        k = xi * per_xi
        total = kappa + gamma
        grad[j, 0] = k * (3.0 / total - 1.0 / kappa)
        grad[j, 1 + 2 * j] = per_xi
        grad[j, 2 + 2 * j] = 3.0 * k / total
        sx = math.sqrt(max(cov2[0, 0], 0.0))
        xis.append(xi)
        gammas.append(gamma)
        amps.append(amp)
        kerrs.append(k)
        xi_sig.append(sx)
        used.append(abs(xi) > 1e-4 and abs(xi) > significance * sx)

    if cov_shared is None:
        # independent traces with kappa held fixed
        cov_k = np.zeros((n_tr, n_tr))
        for j, (_, _, _, cov2, _) in enumerate(per_trace):
            g = grad[j, 1 + 2 * j : 3 + 2 * j]
            cov_k[j, j] = g @ cov2 @ g
    else:
        cov_k = grad @ cov_shared @ grad.T
    kerr_sig = [math.sqrt(max(v, 0.0)) for v in np.diag(cov_k)]

    if not any(used):
        raise FitError("underdetermined: no trace shows a significant nonlinear drive")
    mask = np.array(used)
    k_used = np.array(kerrs)[mask]
    c_used = cov_k[np.ix_(mask, mask)]
    try:
        # generalized least squares for a common K under correlated errors
        w = np.linalg.solve(c_used, np.ones(k_used.size))
        norm = float(np.sum(w))
        if not norm > 0:
            raise np.linalg.LinAlgError
        kerr = float(w @ k_used / norm)
        kerr_sigma = 1.0 / math.sqrt(norm)
    except np.linalg.LinAlgError:
        kerr = float(np.mean(k_used))
        kerr_sigma = float(np.std(k_used) / math.sqrt(k_used.size))

    params = {
        "kerr_hz": kerr,
        "f0_hz": f0,
        "kappa_hz": kappa,
        "phi_rad": phi,
        "gamma_hz": float(np.mean([g for g, u in zip(gammas, used) if u])),
        "xi": xis,
        "gamma_hz_per_trace": gammas,
        "kerr_hz_per_trace": kerrs,
        "amplitude": amps,
        "p_in_w": [d[3] for d in data],
        "bifurcated": [is_bifurcated(x) for x in xis],
        "used": used,
    }
    sigma = {"kerr_hz": kerr_sigma, "xi": xi_sig, "kerr_hz_per_trace": kerr_sig, **shared_sigma}
    rms = math.sqrt(2.0 * float(fun @ fun) / fun.size)
    return FitResult(
        "nonlinear",
        params,
        sigma,
        np.array([[kerr_sigma**2]]),
        ["kerr_hz"],
        rms,
        iterations,
        converged,
    )


# --------------------------------------------------------------------------
# Kerr from frequency shift


def fit_kerr_from_shift(points, f0_hz: float | None = None, min_decades: float = 1.0) -> FitResult:
    """Linear fit of occupation-maximum frequency against photon number.

    With ``f0_hz`` the shift ``f_peak - f0`` is fitted through the origin;
    otherwise ``f0`` is a second free parameter. Points are weighted by
    ``1/n_ph^2`` since photon-number errors are multiplicative.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise FitError("need at least 3 (n_ph, f_peak_hz) points")
    n, fpk = arr[:, 0], arr[:, 1]
    if np.any(n <= 0):
        raise FitError("photon numbers must be positive")
    if np.ptp(n) == 0:
        raise FitError("degenerate abscissas: all photon numbers are equal")
    if math.log10(n.max() / n.min()) < min_decades:
        raise FitError(f"photon numbers span less than {min_decades} decade(s)")
    w = 1.0 / n**2

    if f0_hz is not None:
        s = fpk - f0_hz
        k = float(np.sum(w * n * s) / np.sum(w * n * n))
        r = s - k * n
        dof = n.size - 1
        var = float(np.sum(w * r * r)) / dof
        sk = math.sqrt(var / float(np.sum(w * n * n)))
        params = {"kerr_hz": k, "f0_hz": float(f0_hz)}
        sigma = {"kerr_hz": sk}
        cov = np.array([[sk * sk]])
        names = ["kerr_hz"]
    else:
        A = np.column_stack([np.ones_like(n), n]) * np.sqrt(w)[:, None]
        b = fpk * np.sqrt(w)
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        f0, k = float(coef[0]), float(coef[1])
        r = fpk - f0 - k * n
        dof = n.size - 2
        var = float(np.sum(w * r * r)) / max(dof, 1)
        cov = np.linalg.inv(A.T @ A) * var
        params = {"kerr_hz": k, "f0_hz": f0}
        sigma = {"kerr_hz": math.sqrt(cov[1, 1]), "f0_hz": math.sqrt(cov[0, 0])}
        names = ["f0_hz", "kerr_hz"]
    rms = float(math.sqrt(np.mean(r * r)))
    return FitResult("kerr_shift", params, sigma, cov, names, rms, 1, True)


def kerr_photon_band(
    points,
    f0_hz: float | None = None,
    span_factor: float = 10.0,
    power_sigma_db: float | None = None,
    n_trials: int = 4000,
    seed: int = 0,
    coverage: float = 0.6827,
) -> dict:
    """Asymmetric Kerr interval from a common photon-number calibration error.

    Each trial rescales every photon number by one factor ``s``: log-uniform
    over a total span of ``span_factor`` or, with ``power_sigma_db``, log-normal
    with that standard deviation in dB. Returns the nominal ``kerr_hz`` and
    the distances to the lower and upper edges of the central interval.
    """
    arr = np.asarray(points, dtype=float)
    nominal = fit_kerr_from_shift(arr, f0_hz).params["kerr_hz"]
    rng = np.random.default_rng(seed)
    if power_sigma_db is None:
        half = 0.5 * math.log10(span_factor)
        scale = 10.0 ** rng.uniform(-half, half, n_trials)
    else:
        scale = 10.0 ** (rng.normal(0.0, power_sigma_db, n_trials) / 10.0)
    ks = np.empty(n_trials)
    for i, s in enumerate(scale):
        trial = arr.copy()
        trial[:, 0] *= s
        ks[i] = fit_kerr_from_shift(trial, f0_hz).params["kerr_hz"]
    lo_q, hi_q = 0.5 - 0.5 * coverage, 0.5 + 0.5 * coverage
    mag = np.abs(ks)
    lo, hi = np.quantile(mag, [lo_q, hi_q])
    return {
        "kerr_hz": nominal,
        "minus_hz": abs(nominal) - lo,
        "plus_hz": hi - abs(nominal),
        "samples": ks,
    }


# --------------------------------------------------------------------------
# temperature dependence


def _loss_ratio(t_k, f0_hz, tc_k):
    """``sigma1 / sigma2``; ``None`` outside the sub-gap regime."""
    try:
        s = mattis_bardeen(t_k, f0_hz, tc_k)
    except (UnsupportedRegimeError, DomainError):
        return None
    return s.sigma1_over_n / s.sigma2_over_n


def _profile_tc(temps, qi, f0_hz, tc):
    # for fixed Tc, 1/Qi = u + alpha * sigma1/sigma2 is linear in (u, alpha)
    g = [_loss_ratio(t, f0_hz, tc) for t in temps]
    if any(v is None for v in g):
        return math.inf, None
    g = np.array(g)
    A = np.column_stack([qi, qi * g])
    coef, rnorm = optimize.nnls(A, np.ones_like(qi))
    return rnorm, coef


def fit_qi_vs_temperature(points, f0_hz: float, tc_bounds: tuple | None = None) -> FitResult:
    """Fit ``(alpha, Tc, Qi_max)`` to internal quality factor against temperature.

    The ceiling is fitted as its inverse, so data without a visible ceiling
    drive ``Qi_max`` to infinity without disturbing ``alpha`` and ``Tc``.
    Residuals are ``log(Qi_model / Qi)``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 5:
        raise FitError("need at least 5 (t_k, qi) points")
    temps, qi = arr[:, 0], arr[:, 1]
    if np.any(temps <= 0) or np.any(qi <= 0):
        raise FitError("temperatures and quality factors must be positive")
    if tc_bounds is None:
        tc_bounds = (temps.max() / 0.7, temps.min() / 0.05)
    grid = np.geomspace(tc_bounds[0], tc_bounds[1], 60)
    profiles = [_profile_tc(temps, qi, f0_hz, tc) for tc in grid]
    best = int(np.argmin([p[0] for p in profiles]))
    coef = profiles[best][1]
    if coef is None:
        raise FitError("temperatures outside the model's sub-gap validity for every trial Tc")
    tc0 = grid[best]
    u0 = max(coef[0], 0.0)
    alpha0 = float(np.clip(coef[1], 1e-3, 1.0))
    u_scale = 1.0 / float(np.max(qi))

    def residuals(x):
        alpha, tc, u = x[0], x[1] * tc0, x[2] * u_scale
        out = np.empty(temps.size)
        for i, (t, q) in enumerate(zip(temps, qi)):
            g = _loss_ratio(t, f0_hz, tc)
            if g is None:
                out[i] = 10.0
                continue
            out[i] = -math.log((u + alpha * g) * q)
        return out

    res = _solve(
        residuals,
        [alpha0, 1.0, u0 / u_scale],
        bounds=([1e-6, 0.3, 0.0], [1.0, 3.0, np.inf]),
        x_scale=np.array([alpha0, 1.0, max(u0 / u_scale, 1e-3)]),
    )
    alpha, tc, u = res.x[0], res.x[1] * tc0, res.x[2] * u_scale
    scale = np.array([1.0, tc0, u_scale])
    cov = _covariance(res, 3) * np.outer(scale, scale)
    sig = np.sqrt(np.clip(np.diag(cov), 0, None))
    q_max = math.inf if u <= 0 else 1.0 / u
    sig_qmax = math.inf if u <= 0 else sig[2] / u**2
    params = {"alpha": alpha, "tc_k": tc, "q_i_max": q_max, "f0_hz": float(f0_hz)}
    sigma = {"alpha": sig[0], "tc_k": sig[1], "q_i_max": sig_qmax}
    rms = math.sqrt(float(res.fun @ res.fun) / res.fun.size)
    return FitResult(
        "bcs",
        params,
        sigma,
        cov,
        ["alpha", "tc_k", "inv_q_i_max"],
        rms,
        _iterations(res),
        bool(res.status > 0),
    )


def bcs_params_from(result: FitResult) -> BcsParams:
    p = result.params
    q_max = p["q_i_max"] if math.isfinite(p["q_i_max"]) else 1e300
    return BcsParams(p["tc_k"], min(p["alpha"], 1.0), q_max, p["f0_hz"])


# --------------------------------------------------------------------------
# TLS


def fit_tls(points, lower_bound_fraction: float = 0.2) -> FitResult:
    """Fit the saturable TLS loss model to ``(n_ph, qi)`` data.

    When the TLS loss still makes up more than ``lower_bound_fraction`` of the
    total at the highest photon number, the data never reach the high-power
    plateau; ``q_other`` is then reported as a lower bound (the model ``Qi``
    at the highest photon number) and ``q_other_is_lower_bound`` is set.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 5:
        raise FitError("need at least 5 (n_ph, qi) points")
    n, qi = arr[:, 0], arr[:, 1]
    if np.any(n < 0) or np.any(qi <= 0):
        raise FitError("photon numbers must be non-negative and qi positive")
    order = np.argsort(n)
    n, qi = n[order], qi[order]
    q_ref = float(qi.max())
    q_other0 = 1.05 * q_ref
    inv_tls0 = max(1.0 / qi.min() - 1.0 / q_other0, 1e-3 / q_ref)
    # knee: where the loss sits halfway between its extremes
    loss = 1.0 / qi
    mid = 0.5 * (loss.max() + loss.min())
    k = int(np.argmin(np.abs(loss - mid)))
    n_c0 = max(n[k], n[n > 0].min() if np.any(n > 0) else 1.0)

    def model(x, nn):
        q_tls0, n_c, beta, v = math.exp(x[0]), math.exp(x[1]), x[2], x[3]
        return 1.0 / ((1.0 + nn / n_c) ** (-0.5 * beta) / q_tls0 + v / q_ref)

    def residuals(x):
        return np.log(model(x, n) / qi)

    x0 = [math.log(1.0 / inv_tls0), math.log(n_c0), 1.0, q_ref / q_other0]
    res = _solve(
        residuals,
        x0,
        bounds=([-np.inf, -np.inf, 1e-3, 0.0], [np.inf, np.inf, 2.0, np.inf]),
        x_scale=np.array([1.0, 1.0, 1.0, 1.0]),
    )
    q_tls0, n_c, beta, v = math.exp(res.x[0]), math.exp(res.x[1]), res.x[2], res.x[3]
    cov = _covariance(res, 4)
    sig_x = np.sqrt(np.clip(np.diag(cov), 0, None))
    q_other = math.inf if v <= 0 else q_ref / v
    sig_q_other = math.inf if v <= 0 else q_ref * sig_x[3] / v**2

    qi_low = 1.0 / (1.0 / q_tls0 + v / q_ref)
    n_max = float(n.max())
    tls_loss = (1.0 + n_max / n_c) ** (-0.5 * beta) / q_tls0
    tls_fraction = tls_loss / (tls_loss + v / q_ref)
    lower = bool(tls_fraction > lower_bound_fraction or v <= 2.0 * sig_x[3])
    if lower:
        q_other = float(model(res.x, np.array([n_max]))[0])
        sig_q_other = math.inf

    params = {
        "q_tls0": q_tls0,
        "n_c": n_c,
        "beta_exp": beta,
        "q_other": q_other,
        "qi_low_power": qi_low,
        "qi_high_power": q_other,
        "q_other_is_lower_bound": lower,
    }
    sigma = {
        "q_tls0": q_tls0 * sig_x[0],
        "n_c": n_c * sig_x[1],
        "beta_exp": sig_x[2],
        "q_other": sig_q_other,
    }
    rms = math.sqrt(float(res.fun @ res.fun) / res.fun.size)
    return FitResult(
        "tls",
        params,
        sigma,
        cov,
        ["ln_q_tls0", "ln_n_c", "beta_exp", "q_ref_over_q_other"],
        rms,
        _iterations(res),
        bool(res.status > 0),
    )


def tls_params_from(result: FitResult) -> TlsParams:
    p = result.params
    return TlsParams(p["q_tls0"], p["n_c"], min(p["beta_exp"], 2.0), p["q_other"])


def fit_result_summary(result: FitResult) -> str:
    parts = [f"{result.kind}:"]
    for k, v in result.params.items():
        if isinstance(v, float):
            s = result.sigma.get(k)
            parts.append(f"{k}={v:.6g}" + (f"±{s:.2g}" if isinstance(s, float) else ""))
    return " ".join(parts)
