"""Command-line interface.

Subcommands ``simulate``, ``fit``, ``gain``, ``bcs``, ``material`` and
``synth``. Every model option can also come from a JSON file given with
``--config``; explicit flags override the file, which overrides defaults.

Exit codes: 0 success, 2 invalid input, 3 fit did not converge, 4 file error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bcs import BcsParams, temperature_sweep
from .constants import dbm_to_watts
from .errors import DomainError, FitError, KerrkitError, TraceFormatError
from .fitting import (
    fit_kerr_from_shift,
    fit_linear_trace,
    fit_nonlinear_trace,
    fit_qi_vs_temperature,
    fit_tls,
    kerr_photon_band,
)
from .io import emit_results, format_table, format_trace, load_trace, result_to_json, save_trace
from .materials import NBN_UNIVERSAL, film_table, fit_universal, load_films
from .mixing import gain_sweep
from .resonator import ResonatorParams, frequency_grid, simulate_trace
from .synth import DEFAULT_SEED, synth_trace

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

COMMANDS = ("simulate", "fit", "gain", "bcs", "material", "synth")
SEED_ENV = "KERRKIT_SEED"
FIT_KINDS = ("trace", "kerr-shift", "tls", "bcs")


class ConfigError(KerrkitError, ValueError):
    """Invalid or incomplete run configuration."""


@dataclass
class RunConfig:
    command: str
    input_paths: list = field(default_factory=list)
    output_path: str | None = None
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    force: bool = False


# name -> (type, default, help); names are the argparse dests and config keys
_RESONATOR = {
    "f0_ghz": (float, 95.1, "resonance frequency (GHz)"),
    "qi": (float, 2.0e4, "internal quality factor"),
    "qe": (float, 2.901e4, "coupling quality factor magnitude Qe*"),
    "phi": (float, 0.3, "impedance-mismatch angle (rad)"),
    "kerr_khz": (float, -1.21, "self-Kerr K/2pi (kHz)"),
}
_GRID = {
    "span_linewidths": (float, 10.0, "frequency span in linewidths"),
    "points": (int, 1001, "number of frequency points"),
    "sweep": (str, "up", "sweep direction (up|down)"),
}
_OPTIONS = {
    "simulate": {**_RESONATOR, **_GRID, "power_dbm": (float, -100.0, "incident power (dBm)")},
    "synth": {
        **_RESONATOR,
        **_GRID,
        "power_dbm": (str, "-100", "comma-separated incident powers (dBm)"),
        "snr_db": (float, None, "signal-to-noise ratio per point (dB); omit for noiseless"),
    },
    "fit": {
        "kind": (str, "trace", "trace | kerr-shift | tls | bcs"),
        "f0_ghz": (float, None, "resonance frequency (GHz) for kerr-shift and bcs fits"),
        "power_sigma_dbm": (float, None, "power calibration 1-sigma (dB) for the Kerr band"),
    },
    "gain": {
        **_RESONATOR,
        "qi": (float, 4.755e4, "internal quality factor"),
        "qe": (float, 4.755e3, "coupling quality factor magnitude Qe*"),
        "phi": (float, 0.0, "impedance-mismatch angle (rad)"),
        "xi": (str, "-0.2,-0.3,-0.36,-0.38", "comma-separated reduced pump drives"),
        "delta_min": (float, -1.5, "lowest reduced pump detuning"),
        "delta_max": (float, 1.5, "highest reduced pump detuning"),
        "delta_points": (int, 301, "number of pump detunings"),
        "signal_khz": (float, 450.0, "signal offset from the pump (kHz)"),
    },
    "bcs": {
        "tc": (float, 13.5, "critical temperature (K)"),
        "alpha": (float, 0.9, "kinetic inductance fraction"),
        "q_i_max": (float, 3.0e4, "temperature-independent Qi ceiling"),
        "f0_ghz": (float, 95.0, "resonance frequency (GHz)"),
        "t_min": (float, 0.5, "lowest temperature (K)"),
        "t_max": (float, 8.0, "highest temperature (K)"),
        "t_points": (int, 32, "number of temperatures"),
    },
    "material": {},
}
_INPUT_REQUIRED = {"fit"}
_HELP = {
    "simulate": "noiseless transmission trace at one power",
    "fit": "fit traces or summary data, emit JSON",
    "gain": "forward signal gain over pump detuning and drive",
    "bcs": "internal Q and frequency shift against temperature",
    "material": "film table with sheet inductance and the universal fit",
    "synth": "noisy traces over a power ladder",
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrkit", description="Kerr resonator modelling and fitting.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=_HELP[cmd], description=_HELP[cmd], argument_default=None)
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--input", action="append", dest="input", help="input file (repeatable)")
        p.add_argument("--output", help="output path (stdout when omitted; a directory for synth)")
        p.add_argument("--force", action="store_true", default=None, help="overwrite existing output")
        p.add_argument("--seed", type=int, help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        for name, (typ, default, text) in _OPTIONS[cmd].items():
            shown = "" if default is None else f" [default: {default}]"
            p.add_argument(_flag(name), dest=name, type=typ, help=text + shown)
    return parser


def _read_config_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}:{exc.lineno}: malformed JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    return data


def _coerce(key, value, typ):
    if value is None:
        return None
    try:
        if typ is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return typ(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r}: cannot interpret {value!r} as {typ.__name__}") from None


def _resolve_seed(flag_value, file_value) -> int:
    for source, v in (("--seed", flag_value), ("seed", file_value), (SEED_ENV, os.environ.get(SEED_ENV))):
        if v is None or v == "":
            continue
        try:
            seed = int(v)
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: seed must be an unsigned integer, got {v!r}") from None
        if seed < 0:
            raise ConfigError(f"{source}: seed must be an unsigned integer, got {v!r}")
        return seed
    return DEFAULT_SEED


def parse_config(argv=None) -> RunConfig:
    """Resolve command-line flags, an optional JSON file and defaults."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cmd = ns.command
    spec = _OPTIONS[cmd]

    file_data = _read_config_file(ns.config) if ns.config else {}
    allowed = set(spec) | {"input", "output", "force", "seed", "command"}
    for key in file_data:
        if key not in allowed:
            raise ConfigError(f"config key {key!r} is not an option of {cmd!r}")
    if "command" in file_data and file_data["command"] != cmd:
        raise ConfigError(f"config key 'command' is {file_data['command']!r} but {cmd!r} was requested")

    params = {}
    for name, (typ, default, _) in spec.items():
        value = default
        if name in file_data:
            value = _coerce(name, file_data[name], typ)
        flag_value = getattr(ns, name)
        if flag_value is not None:
            value = flag_value
        params[name] = value

    inputs = ns.input if ns.input is not None else file_data.get("input", [])
    if isinstance(inputs, str):
        inputs = [inputs]
    output = ns.output if ns.output is not None else file_data.get("output")
    force = bool(ns.force) if ns.force is not None else bool(file_data.get("force", False))
    seed = _resolve_seed(ns.seed, file_data.get("seed"))

    if cmd in _INPUT_REQUIRED and not inputs:
        raise ConfigError(f"{cmd}: missing required option --input")
    if "sweep" in params and params["sweep"] not in ("up", "down"):
        raise ConfigError(f"option 'sweep' must be 'up' or 'down', got {params['sweep']!r}")
    if cmd == "fit" and params["kind"] not in FIT_KINDS:
        raise ConfigError(f"option 'kind' must be one of {FIT_KINDS}, got {params['kind']!r}")
    return RunConfig(cmd, list(inputs), output, params, seed, force)


# --------------------------------------------------------------------------
# commands


def _floats(key, text) -> list[float]:
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"option {key!r}: expected comma-separated numbers, got {text!r}") from None


def _resonator(p) -> ResonatorParams:
    return ResonatorParams.from_quality(p["f0_ghz"] * 1e9, p["qi"], p["qe"], p["phi"], p["kerr_khz"] * 1e3)


def _write(cfg: RunConfig, text: str, out=None):
    if cfg.output_path is None:
        (out or sys.stdout).write(text)
        return
    path = Path(cfg.output_path)
    if path.exists() and not cfg.force:
        raise FileExistsError(f"{path}: already exists; use --force to overwrite")
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _cmd_simulate(cfg: RunConfig, out):
    p = cfg.params
    params = _resonator(p)
    f = frequency_grid(params, p["span_linewidths"], p["points"])
    trace = simulate_trace(params, f, dbm_to_watts(p["power_dbm"]), p["sweep"])
    _write(cfg, format_trace(trace), out)


def _cmd_synth(cfg: RunConfig, out):
    p = cfg.params
    params = _resonator(p)
    powers = [dbm_to_watts(x) for x in _floats("power_dbm", p["power_dbm"])]
    f = frequency_grid(params, p["span_linewidths"], p["points"])
    traces = synth_trace(params, powers, p["snr_db"], cfg.seed, f, p["sweep"])
    if cfg.output_path is None:
        for tr in traces:
            out.write(format_trace(tr))
        return
    folder = Path(cfg.output_path)
    folder.mkdir(parents=True, exist_ok=True)
    for i, tr in enumerate(traces):
        save_trace(tr, folder / f"trace_{i:03d}.csv", force=cfg.force)


def _load_pairs(path, names):
    """Two-column numeric CSV with a header row."""
    path = Path(path)
    try:
        lines = [ln for ln in path.read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    if not lines:
        raise TraceFormatError(f"{path}: empty file")
    header = tuple(c.strip() for c in lines[0].split(","))
    if header != names:
        raise TraceFormatError(f"{path}: expected header {','.join(names)!r}, got {lines[0]!r}")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        try:
            a, b = (float(x) for x in ln.split(","))
        except ValueError:
            raise TraceFormatError(f"{path}: bad row {i}: {ln!r}") from None
        if not (math.isfinite(a) and math.isfinite(b)):
            raise TraceFormatError(f"{path}: non-finite value in row {i}")
        rows.append((a, b))
    return np.array(rows)


def _cmd_fit(cfg: RunConfig, out):
    p = cfg.params
    kind = p["kind"]
    if kind == "trace":
        traces = [load_trace(path) for path in cfg.input_paths]
        if len(traces) == 1:
            result = fit_linear_trace(traces[0])
        else:
            # the lowest-power trace fixes the linear parameters
            order = sorted(range(len(traces)), key=lambda i: traces[i].p_in_w)
            low = fit_linear_trace(traces[order[0]])
            if not low.converged:
                raise FitError("low-power linear fit did not converge")
            result = fit_nonlinear_trace([traces[i] for i in order[1:]], low)
    elif kind == "kerr-shift":
        pts = np.vstack([_load_pairs(path, ("n_ph", "f_peak_hz")) for path in cfg.input_paths])
        f0 = None if p["f0_ghz"] is None else p["f0_ghz"] * 1e9
        result = fit_kerr_from_shift(pts, f0)
        band = kerr_photon_band(pts, f0, power_sigma_db=p["power_sigma_dbm"], seed=cfg.seed)
        result.params["kerr_minus_hz"] = band["minus_hz"]
        result.params["kerr_plus_hz"] = band["plus_hz"]
    elif kind == "tls":
        pts = np.vstack([_load_pairs(path, ("n_ph", "qi")) for path in cfg.input_paths])
        result = fit_tls(pts)
    else:
        if p["f0_ghz"] is None:
            raise ConfigError("fit --kind bcs: missing required option --f0-ghz")
        pts = np.vstack([_load_pairs(path, ("t_k", "qi")) for path in cfg.input_paths])
        result = fit_qi_vs_temperature(pts, p["f0_ghz"] * 1e9)
    if cfg.output_path is None:
        out.write(result_to_json(result))
    else:
        emit_results(result, cfg.output_path, "json", force=cfg.force)
    if not result.converged:
        raise FitError("fit did not converge")


def _cmd_gain(cfg: RunConfig, out):
    p = cfg.params
    params = _resonator(p)
    xi = _floats("xi", p["xi"])
    grid = np.linspace(p["delta_min"], p["delta_max"], p["delta_points"])
    delta_s = p["signal_khz"] * 1e3 / params.linewidth_hz
    table = gain_sweep(params, xi, grid, delta_s)
    cols = {"xi": table.xi, "delta": table.delta, "re_gain": table.gain.real, "im_gain": table.gain.imag}
    cols["gain_db"] = table.gain_db
    _write(cfg, format_table(cols), out)


def _cmd_bcs(cfg: RunConfig, out):
    p = cfg.params
    params = BcsParams(p["tc"], p["alpha"], p["q_i_max"], p["f0_ghz"] * 1e9)
    temps = np.linspace(p["t_min"], p["t_max"], p["t_points"])
    sweep = temperature_sweep(params, temps)
    _write(cfg, format_table({"t_k": sweep["t_k"], "qi": sweep["qi"], "f0_ratio": sweep["f0_ratio"]}), out)


def _cmd_material(cfg: RunConfig, out):
    if cfg.input_paths:
        films = [f for path in cfg.input_paths for f in load_films(path)]
    else:
        films = load_films(Path(__file__).with_name("data") / "nbn_films.csv")
    rows = film_table(films)
    fit = fit_universal(films)
    text = format_table({k: [r[k] for r in rows] for k in rows[0]})
    text = (
        f"# universal_a={fit.a_coeff:.12g} a_err={fit.a_err:.12g} "
        f"b={fit.b_exp:.12g} b_err={fit.b_err:.12g} "
        f"(reference a={NBN_UNIVERSAL.a_coeff:g} b={NBN_UNIVERSAL.b_exp:g})\n" + text
    )
    _write(cfg, text, out)


_HANDLERS = {
    "simulate": _cmd_simulate,
    "synth": _cmd_synth,
    "fit": _cmd_fit,
    "gain": _cmd_gain,
    "bcs": _cmd_bcs,
    "material": _cmd_material,
}


def run(cfg: RunConfig, out=None) -> None:
    _HANDLERS[cfg.command](cfg, out or sys.stdout)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        # argparse: --help/--version exit 0, usage errors exit 2
        return int(exc.code or 0)
    except ConfigError as exc:
        err.write(f"kerrkit: error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        err.write(f"kerrkit: error: {exc}\n")
        return EXIT_IO
    try:
        run(cfg, out)
    except FitError as exc:
        err.write(f"kerrkit: fit failed: {exc}\n")
        return EXIT_NONCONVERGENCE
    except (OSError, TraceFormatError) as exc:
        err.write(f"kerrkit: error: {exc}\n")
        return EXIT_IO
    except (ConfigError, DomainError, KerrkitError, ValueError) as exc:
        err.write(f"kerrkit: error: {exc}\n")
        return EXIT_VALIDATION
    return EXIT_OK


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
