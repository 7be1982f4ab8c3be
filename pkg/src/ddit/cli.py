"""Command-line entry point.

Exit codes: 0 success, 1 parse or validation error, 2 solver error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import closed_forms, lindblad, semiclassical
from .analysis import (Backend, NoCentralWindowError, SweepError, UnderResolvedError,
                       detect_windows, sweep)
from .io import ConfigError, RunConfig, emit, format_config, parse_config, preset_entries
from .model import CavityParams, DetuningGrid, ParameterError
from .presets import PRESETS, get_preset
from .spectral import (cavity_eigensystem, cavity_transition_rates, free_space_rates,
                       rate_crossing_scan, single_excitation_eigensystem,
                       transition_rates_closed)

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2

_INPUT_ERRORS = (ConfigError, ParameterError, KeyError, OSError)
_SOLVER_ERRORS = (SweepError, UnderResolvedError, NoCentralWindowError,
                  semiclassical.SingularSystemError, closed_forms.UnsupportedChainError,
                  lindblad.OracleCapError, lindblad.SteadyStateError, ValueError,
                  ArithmeticError, np.linalg.LinAlgError)


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="run description file")
    parser.add_argument("--preset", metavar="NAME", help="compiled-in figure preset")
    parser.add_argument("--backend", choices=[b.value for b in Backend])
    parser.add_argument("--format", choices=["csv", "json"])
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--grid", nargs=3, metavar=("START", "STOP", "COUNT"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddit", description="Steady-state spectra of driven dipole-coupled TLS chains.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="sweep the detuning and emit the response")
    _common(p)
    p.add_argument("--workers", type=int, default=1, help="concurrent oracle solves")

    p = sub.add_parser("windows", help="detect transparency windows and peaks")
    _common(p)

    p = sub.add_parser("eigen", help="single-excitation eigensystem")
    _common(p)

    p = sub.add_parser("rates", help="golden-rule decay rates or a crossing scan")
    _common(p)
    p.add_argument("--scan-d", nargs=3, metavar=("START", "STOP", "SAMPLES"),
                   help="scan the tail coupling and report rate crossings")
    p.add_argument("--closed", action="store_true", help="use the closed-form rates")

    p = sub.add_parser("validate", help="cross-backend agreement report")
    _common(p)
    p.add_argument("--oracle-points", type=int, default=41,
                   help="grid points evaluated with the master-equation oracle")

    p = sub.add_parser("preset", help="list presets or print one as a config")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    return parser


def _load(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    elif args.preset:
        get_preset(args.preset)
        text = f"preset = {args.preset}\n"
    else:
        raise ConfigError("one of --config or --preset is required")
    cfg = parse_config(text)
    changes = {}
    if args.backend:
        changes["backend"] = Backend(args.backend)
    if args.format:
        changes["format"] = args.format
    if args.grid:
        try:
            start, stop, count = float(args.grid[0]), float(args.grid[1]), int(args.grid[2])
        except ValueError:
            raise ConfigError(f"--grid expects START STOP COUNT, got {args.grid}") from None
        changes["grid"] = DetuningGrid(start, stop, count)
    if changes:
        cfg = RunConfig(**{**cfg.__dict__, **changes})
    return cfg


def _validate_report(cfg: RunConfig, oracle_points: int) -> dict:
    params = cfg.params
    deltas = cfg.grid.values
    general = sweep(params, cfg.grid, Backend.GENERAL)
    report: dict = {"grid": [cfg.grid.start, cfg.grid.stop, cfg.grid.count]}
    try:
        closed = sweep(params, cfg.grid, Backend.CLOSED)
        rel = np.abs(closed.values - general.values) / np.abs(general.values)
        report["closed_vs_general_max_rel"] = float(np.max(rel))
    except closed_forms.UnsupportedChainError as exc:
        report["closed_vs_general_max_rel"] = f"skipped: {exc}"
    idx = np.unique(np.linspace(0, deltas.size - 1, max(oracle_points, 2)).round().astype(int))
    try:
        oracle = lindblad.oracle_response(params, deltas[idx])
        sign = -1.0 if isinstance(params, CavityParams) else 1.0
        dev = np.max(np.abs(sign * oracle.imag / general.norm - general.absorption[idx]))
        report["oracle_vs_general_absorption_sup"] = float(dev)
        report["oracle_points"] = int(idx.size)
    except lindblad.OracleCapError as exc:
        report["oracle_vs_general_absorption_sup"] = f"skipped: {exc}"
    return report


def _run(args) -> bytes:
    if args.command == "preset":
        if args.list or not args.name:
            lines = [f"{p.name}\t{p.description}" for p in PRESETS.values()]
            return ("\n".join(lines) + "\n").encode()
        return format_config(preset_entries(args.name)).encode()

    cfg = _load(args)
    params = cfg.params
    cavity = isinstance(params, CavityParams)
    if args.command == "spectrum":
        result = sweep(params, cfg.grid, cfg.backend, max_workers=args.workers)
    elif args.command == "windows":
        result = detect_windows(sweep(params, cfg.grid, cfg.backend))
    elif args.command == "eigen":
        result = cavity_eigensystem(params) if cavity else single_excitation_eigensystem(params)
    elif args.command == "rates":
        if args.scan_d:
            try:
                lo, hi, samples = float(args.scan_d[0]), float(args.scan_d[1]), int(args.scan_d[2])
            except ValueError:
                raise ConfigError(f"--scan-d expects START STOP SAMPLES, got {args.scan_d}") from None
            result = rate_crossing_scan(params, lo, hi, samples, closed=args.closed)
        elif cavity:
            result = cavity_transition_rates(params, closed=args.closed)
        elif args.closed:
            eig = single_excitation_eigensystem(params)
            result = transition_rates_closed(params)
            result = type(result)(rates=result.rates, energies=eig.energies)
        else:
            result = free_space_rates(params)
    else:
        result = _validate_report(cfg, args.oracle_points)
    return emit(result, cfg.format)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        data = _run(args)
    except _INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except _SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if args.command != "preset" and args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
