"""Run configuration parsing and CSV/JSON serialization.

Config grammar, one statement per line::

    # comment
    key = value
    tail.d = [0.35, 0.35]

Scalars are numbers or bare words, lists are bracketed and comma separated,
``grid`` is ``[start, stop, count]``.  A ``preset`` line loads a compiled-in
parameter set that the remaining lines override.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math
from dataclasses import dataclass

import numpy as np

from .analysis import Backend
from .model import (CavityParams, ChainParams, DetuningGrid, EigenSystem, ParameterError,
                    Params, Peak, RateSet, Spectrum, SpectrumKind, Window, WindowReport,
                    validate)
from .presets import get_preset
from .spectral import Crossing

FORMATS = ("csv", "json")
MODES = ("free_space", "cavity")

_NUMBER_KEYS = {"d0", "d", "gamma0", "gamma", "omega_p", "g", "kappa", "epsilon"}
_INT_KEYS = {"n", "n_max"}
_LIST_KEYS = {"tail.d", "tail.gamma", "grid"}
_WORD_KEYS = {"mode", "preset", "backend", "format"}
KEYS = _NUMBER_KEYS | _INT_KEYS | _LIST_KEYS | _WORD_KEYS
_CAVITY_ONLY = {"g", "kappa", "epsilon", "n_max"}
_FREE_ONLY = {"omega_p"}
# setting one member of a pair discards the other one inherited from a preset
_EXCLUSIVE = {"d": "tail.d", "tail.d": "d", "gamma": "tail.gamma", "tail.gamma": "gamma"}

DEFAULT_GRID = (-3.0, 3.0, 2001)


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RunConfig:
    params: Params
    grid: DetuningGrid
    backend: Backend = Backend.GENERAL
    format: str = "csv"
    preset: str | None = None


def _parse_value(key: str, raw: str, line: int):
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"missing value for {key!r}", line)
    try:
        if key in _LIST_KEYS:
            if not (raw.startswith("[") and raw.endswith("]")):
                raise ConfigError(f"{key!r} expects a bracketed list", line)
            body = raw[1:-1].strip()
            return [float(x) for x in body.split(",")] if body else []
        if key in _INT_KEYS:
            value = float(raw)
            if value != int(value):
                raise ConfigError(f"{key!r} must be an integer, got {raw}", line)
            return int(value)
        if key in _NUMBER_KEYS:
            return float(raw)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse value {raw!r} for {key!r}", line) from None
    return raw.strip("\"'")


def _read_statements(text: str) -> dict[str, tuple[object, int]]:
    found: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in found:
            raise ConfigError(f"duplicate key {key!r} (first on line {found[key][1]})", lineno)
        found[key] = (_parse_value(key, raw, lineno), lineno)
    return found


def preset_entries(name: str) -> dict[str, object]:
    """Flat key/value form of a preset (the same keys a config file uses)."""
    preset = get_preset(name)
    out = params_entries(preset.params)
    out["grid"] = [preset.grid.start, preset.grid.stop, preset.grid.count]
    return out


def params_entries(params: Params) -> dict[str, object]:
    cavity = isinstance(params, CavityParams)
    chain = params.chain if cavity else params
    out: dict[str, object] = {"mode": "cavity" if cavity else "free_space",
                              "n": chain.n_extra, "d0": chain.d0, "gamma0": chain.gamma0}
    d = chain.uniform_tail_coupling()
    if chain.n_extra >= 2:
        if d is not None:
            out["d"] = d
        else:
            out["tail.d"] = list(chain.d_tail)
    gt = set(chain.gamma_tail)
    if len(gt) == 1:
        out["gamma"] = chain.gamma_tail[0]
    elif chain.gamma_tail:
        out["tail.gamma"] = list(chain.gamma_tail)
    if cavity:
        out.update(g=params.g, kappa=params.kappa, epsilon=params.epsilon,
                   n_max=params.n_max)
    else:
        out["omega_p"] = chain.omega_p
    return out


def format_config(entries: dict[str, object]) -> str:
    """Inverse of the config grammar for a flat entry dict."""
    lines = []
    for key, value in entries.items():
        if isinstance(value, (list, tuple)):
            items = [repr(int(v)) if key == "grid" and i == 2 else repr(float(v))
                     for i, v in enumerate(value)]
            lines.append(f"{key} = [{', '.join(items)}]")
        elif isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run description.

    Raises ConfigError (with a line number where one applies) or
    ParameterError from validation.
    """
    statements = _read_statements(text)
    entries: dict[str, object] = {}
    lines: dict[str, int] = {}
    preset_name = None
    if "preset" in statements:
        preset_name, lineno = statements.pop("preset")
        try:
            entries = preset_entries(preset_name)
        except KeyError as exc:
            raise ConfigError(exc.args[0], lineno) from None
    for key, (value, lineno) in statements.items():
        other = _EXCLUSIVE.get(key)
        if other in statements:
            raise ConfigError(f"{key!r} and {other!r} are mutually exclusive", lineno)
        entries.pop(other, None)
        entries[key] = value
        lines[key] = lineno
    return _build(entries, lines, preset_name)


def _build(entries: dict, lines: dict, preset_name: str | None) -> RunConfig:
    def need(key):
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}")
        return entries[key]

    mode = entries.get("mode", "free_space")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}", lines.get("mode"))
    wrong = _FREE_ONLY if mode == "cavity" else _CAVITY_ONLY
    for key in wrong:
        if key in entries:
            raise ConfigError(f"key {key!r} does not apply in {mode} mode", lines.get(key))

    n = need("n")
    if n < 0:
        raise ConfigError("'n' must be >= 0", lines.get("n"))
    if mode == "cavity" and "d0" not in entries and "d" in entries:
        entries["d0"] = entries["d"]
    d0 = need("d0") if n >= 1 else entries.get("d0", 0.0)
    if "tail.d" in entries:
        d_tail = tuple(entries["tail.d"])
    elif n >= 2:
        d_tail = (need("d"),) * (n - 1)
    else:
        d_tail = ()
    if "tail.gamma" in entries:
        gamma_tail = tuple(entries["tail.gamma"])
    elif n >= 1:
        gamma_tail = (need("gamma"),) * n
    else:
        gamma_tail = ()
    gamma0 = need("gamma0")
    omega_p = need("omega_p") if mode == "free_space" else 1.0
    chain = ChainParams(n_extra=n, d0=d0, d_tail=d_tail, gamma0=gamma0,
                        gamma_tail=gamma_tail, omega_p=omega_p)
    if mode == "cavity":
        params: Params = CavityParams(chain=chain, g=need("g"), kappa=need("kappa"),
                                      epsilon=need("epsilon"),
                                      n_max=entries.get("n_max", 2))
    else:
        params = chain
    validate(params)

    raw_grid = entries.get("grid", DEFAULT_GRID)
    if len(raw_grid) != 3:
        raise ConfigError("grid expects [start, stop, count]", lines.get("grid"))
    start, stop, count = raw_grid
    if count != int(count):
        raise ConfigError("grid count must be an integer", lines.get("grid"))
    grid = DetuningGrid(float(start), float(stop), int(count))

    try:
        backend = Backend(entries.get("backend", "general"))
    except ValueError:
        raise ConfigError(f"unknown backend {entries['backend']!r}",
                          lines.get("backend")) from None
    fmt = entries.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", lines.get("format"))
    return RunConfig(params=params, grid=grid, backend=backend, format=fmt,
                     preset=preset_name)


# ---------------------------------------------------------------- emit

def _g(x: float) -> str:
    return format(float(x), ".17g")


def _csv_bytes(header: list[str], rows) -> bytes:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _g(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


def _grid_dict(grid: DetuningGrid) -> dict:
    return {"start": grid.start, "stop": grid.stop, "count": grid.count}


def _to_dict(obj) -> dict:
    if isinstance(obj, Spectrum):
        return {"type": "Spectrum", "grid": _grid_dict(obj.grid), "kind": obj.kind.value,
                "norm": obj.norm,
                "values": [[float(v.real), float(v.imag)] for v in obj.values]}
    if isinstance(obj, WindowReport):
        return {"type": "WindowReport",
                "windows": [{"center": w.center, "depth": w.depth, "fwhm": w.fwhm,
                             "asymmetry": w.asymmetry} for w in obj.windows],
                "peaks": [{"center": p.center, "height": p.height} for p in obj.peaks]}
    if isinstance(obj, RateSet):
        return {"type": "RateSet", "rates": [float(r) for r in obj.rates],
                "energies": (None if obj.energies is None
                             else [float(e) for e in obj.energies])}
    if isinstance(obj, EigenSystem):
        return {"type": "EigenSystem", "energies": [float(e) for e in obj.energies],
                "vectors": [[float(v) for v in row] for row in obj.vectors],
                "ground_energy": float(obj.ground_energy)}
    if isinstance(obj, list) and all(isinstance(c, Crossing) for c in obj):
        return {"type": "Crossings",
                "crossings": [{"d": c.d, "pairs": [list(p) for p in c.pairs]} for c in obj]}
    if isinstance(obj, dict):
        return obj
    raise TypeError(f"cannot emit {type(obj).__name__}")


def _csv_table(obj) -> tuple[list[str], list]:
    if isinstance(obj, Spectrum):
        v = obj.values
        rows = zip(obj.detuning, v.real, v.imag, v.real / obj.norm, v.imag / obj.norm)
        return ["detuning", "re", "im", "re_norm", "im_norm"], rows
    if isinstance(obj, WindowReport):
        rows = [("window", w.center, w.depth, w.fwhm, w.asymmetry, "") for w in obj.windows]
        rows += [("peak", p.center, "", "", "", p.height) for p in obj.peaks]
        return ["record", "center", "depth", "fwhm", "asymmetry", "height"], rows
    if isinstance(obj, RateSet):
        energies = obj.energies if obj.energies is not None else [math.nan] * len(obj.rates)
        rows = [(str(k), e, r) for k, (e, r) in enumerate(zip(energies, obj.rates))]
        return ["index", "energy", "rate"], rows
    if isinstance(obj, EigenSystem):
        size = obj.vectors.shape[1]
        rows = [(str(k), e, *obj.vectors[k]) for k, e in enumerate(obj.energies)]
        return ["index", "energy"] + [f"v{j}" for j in range(size)], rows
    if isinstance(obj, list) and all(isinstance(c, Crossing) for c in obj):
        rows = [(c.d, " ".join(f"{i}-{j}" for i, j in c.pairs)) for c in obj]
        return ["d", "pairs"], rows
    if isinstance(obj, dict):
        return ["key", "value"], [(k, v if isinstance(v, str) else json.dumps(v))
                                  for k, v in obj.items()]
    raise TypeError(f"cannot emit {type(obj).__name__}")


def emit(obj, fmt: str = "csv") -> bytes:
    """Serialize a result record as CSV (header row first) or JSON."""
    if fmt == "json":
        return _json_bytes(_to_dict(obj))
    if fmt == "csv":
        return _csv_bytes(*_csv_table(obj))
    raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


# ---------------------------------------------------------------- read back

def read_csv_columns(data: bytes) -> dict[str, np.ndarray]:
    """Columns of an emitted CSV table keyed by header name.

    Numeric columns become float arrays; anything else stays as strings.
    """
    reader = csv.reader(_stdio.StringIO(data.decode("utf-8")))
    header = next(reader)
    rows = list(reader)
    out = {}
    for k, name in enumerate(header):
        cells = [r[k] for r in rows]
        try:
            out[name] = np.array([float(c) if c else math.nan for c in cells])
        except ValueError:
            out[name] = np.array(cells)
    return out


def spectrum_from_json(data: bytes) -> Spectrum:
    d = json.loads(data)
    values = np.array([complex(re, im) for re, im in d["values"]])
    return Spectrum(grid=DetuningGrid(**d["grid"]), values=values,
                    kind=SpectrumKind(d["kind"]), norm=d["norm"])


def window_report_from_json(data: bytes) -> WindowReport:
    d = json.loads(data)
    return WindowReport(windows=tuple(Window(**w) for w in d["windows"]),
                        peaks=tuple(Peak(**p) for p in d["peaks"]))


def rate_set_from_json(data: bytes) -> RateSet:
    d = json.loads(data)
    energies = None if d["energies"] is None else np.array(d["energies"])
    return RateSet(rates=np.array(d["rates"]), energies=energies)


__all__ = ["ConfigError", "RunConfig", "parse_config", "format_config", "preset_entries",
           "params_entries", "emit", "read_csv_columns", "spectrum_from_json",
           "window_report_from_json", "rate_set_from_json", "ParameterError"]
