"""Trace and result files.

Traces are CSV with a ``freq_hz,re_s21,im_s21`` header, optionally preceded
by ``# key=value`` metadata lines (``power_dbm``, ``temperature_k``,
``sweep=up|down``). Fit results are JSON; tables are CSV with 12
significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .constants import dbm_to_watts, watts_to_dbm
from .errors import DomainError, TraceFormatError
from .fitting import FitResult
from .resonator import ComplexTrace

TRACE_HEADER = ("freq_hz", "re_s21", "im_s21")
CSV_DIGITS = 12
TRACE_DIGITS = 17
FORMATS = ("json", "csv")


def _parse_meta(line: str) -> tuple[str, str]:
    body = line.lstrip("#").strip()
    if "=" not in body:
        return "", ""
    key, value = (s.strip() for s in body.split("=", 1))
    return key, value


def load_trace(path, strict: bool = True) -> ComplexTrace:
    """Read a trace CSV.

    Rows are sorted by frequency. Duplicate frequencies, a missing header and,
    in strict mode, non-finite values raise :class:`TraceFormatError` naming
    the file and line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc

    meta: dict[str, str] = {}
    header_seen = False
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, value = _parse_meta(line)
            if key:
                meta[key] = value
            continue
        if not header_seen:
            cols = tuple(c.strip() for c in line.split(","))
            if cols != TRACE_HEADER:
                raise TraceFormatError(f"{path}:{lineno}: expected header {','.join(TRACE_HEADER)!r}, got {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise TraceFormatError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise TraceFormatError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
        if strict and not all(math.isfinite(v) for v in values):
            raise TraceFormatError(f"{path}:{lineno}: non-finite value in {line!r}")
        rows.append((values[0], complex(values[1], values[2]), lineno))

    if not header_seen:
        raise TraceFormatError(f"{path}: missing header {','.join(TRACE_HEADER)!r}")
    if not rows:
        raise TraceFormatError(f"{path}: no data rows")

    rows.sort(key=lambda r: r[0])
    for a, b in zip(rows, rows[1:]):
        if a[0] == b[0]:
            raise TraceFormatError(f"{path}:{b[2]}: duplicate frequency {b[0]!r} (first at line {a[2]})")

    p_in = math.nan
    temperature = math.nan
    sweep = "up"
    try:
        if "power_dbm" in meta:
            p_in = dbm_to_watts(float(meta["power_dbm"]))
        if "temperature_k" in meta:
            temperature = float(meta["temperature_k"])
    except ValueError as exc:
        raise TraceFormatError(f"{path}: bad metadata value ({exc})") from None
    if "sweep" in meta:
        sweep = meta["sweep"]
        if sweep not in ("up", "down"):
            raise TraceFormatError(f"{path}: sweep must be 'up' or 'down', got {sweep!r}")
    extra = {k: v for k, v in meta.items() if k not in ("power_dbm", "temperature_k", "sweep")}
    return ComplexTrace(
        np.array([r[0] for r in rows]),
        np.array([r[1] for r in rows]),
        p_in,
        temperature,
        sweep,
        extra,
    )


def format_trace(trace: ComplexTrace) -> str:
    """Serialize a trace; round-trips exactly through :func:`load_trace`."""
    out = io.StringIO()
    if trace.p_in_w > 0:
        out.write(f"# power_dbm={watts_to_dbm(trace.p_in_w):.{TRACE_DIGITS}g}\n")
    if math.isfinite(trace.temperature_k):
        out.write(f"# temperature_k={trace.temperature_k:.{TRACE_DIGITS}g}\n")
    out.write(f"# sweep={trace.sweep_direction}\n")
    for k, v in trace.meta.items():
        out.write(f"# {k}={v}\n")
    out.write(",".join(TRACE_HEADER) + "\n")
    for f, z in zip(trace.freq_hz, trace.s21):
        out.write(f"{f:.{TRACE_DIGITS}g},{z.real:.{TRACE_DIGITS}g},{z.imag:.{TRACE_DIGITS}g}\n")
    return out.getvalue()


def _check_target(path: Path, force: bool):
    if path.exists() and not force:
        raise FileExistsError(f"{path}: already exists; pass force=True (--force) to overwrite")


def _write_text(path: Path, text: str, force: bool):
    _check_target(path, force)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def save_trace(trace: ComplexTrace, path, force: bool = False) -> Path:
    path = Path(path)
    _write_text(path, format_trace(trace), force)
    return path


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.{CSV_DIGITS}g}"


def format_table(columns: dict) -> str:
    """CSV text for equal-length columns, 12 significant digits."""
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    lengths = {d.shape[0] for d in data}
    if len(lengths) > 1:
        raise DomainError("table columns differ in length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*data):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def result_to_json(result: FitResult) -> str:
    # inf/nan are written as JSON extensions Infinity/NaN, which json reads back
    return json.dumps(result.to_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"


def _result_rows(result: FitResult) -> dict:
    names, values, sigmas = [], [], []
    for k, v in result.params.items():
        if isinstance(v, (list, tuple, np.ndarray)):
            s = result.sigma.get(k)
            for i, x in enumerate(v):
                names.append(f"{k}[{i}]")
                values.append(float(x))
                sigmas.append(float(s[i]) if isinstance(s, (list, tuple, np.ndarray)) else math.nan)
        else:
            names.append(k)
            values.append(float(v))
            s = result.sigma.get(k, math.nan)
            sigmas.append(float(s) if not isinstance(s, (list, tuple, np.ndarray)) else math.nan)
    return {"name": names, "value": values, "sigma": sigmas}


def emit_results(result, path, fmt: str = "json", force: bool = False) -> Path:
    """Write a fit result or a table to ``path``.

    ``result`` is a :class:`FitResult`, a mapping of equal-length columns
    (CSV only) or an object with ``rows()`` yielding dicts. Existing files are
    not overwritten unless ``force`` is set.
    """
    if fmt not in FORMATS:
        raise DomainError(f"format must be one of {FORMATS}, got {fmt!r}")
    path = Path(path)
    if isinstance(result, FitResult):
        text = result_to_json(result) if fmt == "json" else format_table(_result_rows(result))
    elif fmt == "json":
        raise DomainError("JSON output is only defined for fit results")
    elif hasattr(result, "rows"):
        rows = list(result.rows())
        cols = {k: [r[k] for r in rows] for k in rows[0]} if rows else {}
        text = format_table(cols)
    else:
        text = format_table(dict(result))
    _write_text(path, text, force)
    return path


def load_result(path) -> FitResult:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    missing = {"kind", "params", "sigma", "residual_rms", "converged", "n_iterations"} - set(data)
    if missing:
        raise TraceFormatError(f"{path}: missing keys {sorted(missing)}")
    return FitResult.from_dict(data)

