"""Detuning sweeps and spectral feature extraction.

Window conventions
------------------
Free space: a transparency window is a local minimum of the absorption
between two peaks whose value is below ``(1 - depth_threshold)`` times the
lower of the two peaks.  Its depth is ``1 - min/lower_peak`` and its FWHM is
measured at the mid level between the minimum and that peak.

Cavity: the cavity response shows N + 2 peaks (two outer polaritons and N
inner resonances); the transparency windows are the inner peaks.  An inner
peak qualifies when the higher of its two flanking minima is below
``(1 - depth_threshold)`` times the peak; depth and FWHM use that minimum as
the reference level.

``depth_threshold = 0.5`` is a heuristic separating induced-transparency
features from ripple.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.signal import find_peaks

from . import closed_forms, lindblad, semiclassical
from .model import (CavityParams, ChainParams, DetuningGrid, Params, Peak, Spectrum,
                    SpectrumKind, Window, WindowReport, validate)
from .spectral import tail_coupling_matrix

DEPTH_THRESHOLD = 0.5
MIN_POINTS_PER_FEATURE = 5


class Backend(enum.Enum):
    CLOSED = "closed"
    GENERAL = "general"
    ORACLE = "oracle"


class SweepError(RuntimeError):
    def __init__(self, message: str, grid_index: int | None = None):
        self.grid_index = grid_index
        super().__init__(message)


class UnderResolvedError(ValueError):
    def __init__(self, message: str, suggested_count: int):
        self.suggested_count = suggested_count
        super().__init__(message)


class NoCentralWindowError(ValueError):
    pass


def bare_norm(params: Params) -> float:
    if isinstance(params, CavityParams):
        return params.epsilon / params.kappa
    return params.omega_p / params.gamma0


def sweep(params: Params, grid: DetuningGrid, backend: Backend | str = Backend.GENERAL,
          max_workers: int = 1) -> Spectrum:
    """Evaluate the chosen solver on every grid point.

    ``max_workers`` bounds the number of concurrent oracle solves; the other
    backends are vectorized over the grid.
    """
    backend = Backend(backend)
    validate(params)
    cavity = isinstance(params, CavityParams)
    deltas = grid.values

    if backend is Backend.GENERAL:
        solve = semiclassical.solve_cavity if cavity else semiclassical.solve_free_space
        try:
            values = solve(params, deltas)
        except semiclassical.SingularSystemError as exc:
            raise SweepError(f"{exc} (detuning {deltas[exc.grid_index]:g})",
                             exc.grid_index) from exc
    elif backend is Backend.CLOSED:
        solve = closed_forms.closed_form_cavity if cavity else closed_forms.closed_form_free_space
        with np.errstate(all="ignore"):
            values = solve(params, deltas)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise SweepError(f"closed form not finite at detuning {deltas[bad[0]]:g}",
                             int(bad[0]))
    else:
        values = _oracle_values(params, deltas, max_workers)

    kind = SpectrumKind.CAVITY if cavity else SpectrumKind.FREE_SPACE
    return Spectrum(grid=grid, values=values, kind=kind, norm=bare_norm(params))


def _oracle_values(params: Params, deltas: np.ndarray, max_workers: int) -> np.ndarray:
    def one(k: int) -> complex:
        try:
            return lindblad.oracle_response(params, float(deltas[k]))
        except (lindblad.SteadyStateError, np.linalg.LinAlgError) as exc:
            raise SweepError(f"oracle failed at detuning {deltas[k]:g}: {exc}", k) from exc

    # fail fast on the dimension cap before spawning work
    lindblad.oracle_response(params, float(deltas[0]))
    if max_workers <= 1:
        return np.array([one(k) for k in range(deltas.size)])
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return np.array(list(pool.map(one, range(deltas.size))))


@dataclass(frozen=True)
class _Feature:
    index: int      # grid index of the extremum
    value: float    # absorption at the extremum
    ref: float      # reference level (lower peak for dips, higher minimum for peaks)
    lo: int         # bracketing grid indices
    hi: int


def _local_maxima(y: np.ndarray) -> np.ndarray:
    idx, _ = find_peaks(y)
    return idx


def _crossing(x: np.ndarray, y: np.ndarray, start: int, stop: int, level: float) -> float:
    """First x where y crosses ``level`` walking from ``start`` toward ``stop``."""
    step = 1 if stop > start else -1
    for k in range(start, stop, step):
        y0, y1 = y[k], y[k + step]
        if (y0 - level) * (y1 - level) <= 0 and y0 != y1:
            return x[k] + (level - y0) * (x[k + step] - x[k]) / (y1 - y0)
    return x[stop]


def _candidate_features(spec: Spectrum, peaks: np.ndarray) -> list[_Feature]:
    y = spec.absorption
    feats = []
    if spec.kind is SpectrumKind.FREE_SPACE:
        for left, right in zip(peaks[:-1], peaks[1:]):
            k = left + int(np.argmin(y[left:right + 1]))
            feats.append(_Feature(k, y[k], min(y[left], y[right]), left, right))
    else:
        minima = [left + int(np.argmin(y[left:right + 1]))
                  for left, right in zip(peaks[:-1], peaks[1:])]
        for m, k in enumerate(peaks[1:-1]):
            lo, hi = minima[m], minima[m + 1]
            feats.append(_Feature(k, y[k], max(y[lo], y[hi]), lo, hi))
    return feats


def _measure(spec: Spectrum, f: _Feature) -> Window:
    x, y = spec.detuning, spec.absorption
    level = 0.5 * (f.value + f.ref)
    left = _crossing(x, y, f.index, f.lo, level)
    right = _crossing(x, y, f.index, f.hi, level)
    fwhm = right - left
    if spec.kind is SpectrumKind.FREE_SPACE:
        depth = 1.0 - f.value / f.ref
    else:
        depth = 1.0 - f.ref / f.value
    lw, rw = x[f.index] - left, right - x[f.index]
    asym = abs(lw - rw) / fwhm if fwhm > 0 else 0.0
    return Window(center=float(x[f.index]), depth=float(min(max(depth, 0.0), 1.0)),
                  fwhm=float(fwhm), asymmetry=float(asym))


def _suggest_count(grid: DetuningGrid, width: float, min_points: int) -> int:
    # widths measured on a coarse grid are unreliable, hence the factor 2
    return int(math.ceil(2 * min_points * (grid.stop - grid.start) / width)) + 1


def detect_windows(spec: Spectrum, depth_threshold: float = DEPTH_THRESHOLD,
                   min_points: int = MIN_POINTS_PER_FEATURE,
                   check_resolution: bool = True) -> WindowReport:
    """Peaks and transparency windows of a sampled spectrum.

    Raises UnderResolvedError when a qualifying window, or the spacing of two
    adjacent peaks, spans fewer than ``min_points`` grid steps.
    """
    y = spec.absorption
    x = spec.detuning
    step = spec.grid.step
    peaks = _local_maxima(y)
    windows = []
    for f in _candidate_features(spec, peaks):
        if spec.kind is SpectrumKind.FREE_SPACE:
            qualifies = f.ref > 0 and f.value < (1 - depth_threshold) * f.ref
        else:
            qualifies = f.value > 0 and f.ref < (1 - depth_threshold) * f.value
        if qualifies:
            windows.append(_measure(spec, f))

    if check_resolution:
        narrow = [w.fwhm for w in windows if w.fwhm < min_points * step]
        gaps = np.diff(x[peaks]) if peaks.size > 1 else np.array([])
        narrow += [g for g in gaps if g < min_points * step]
        if narrow:
            finest = min(narrow)
            suggested = _suggest_count(spec.grid, finest, min_points)
            raise UnderResolvedError(
                f"feature of width {finest:.3g} spans fewer than {min_points} grid "
                f"steps; use at least {suggested} points", suggested)

    return WindowReport(
        windows=tuple(windows),
        peaks=tuple(Peak(center=float(x[k]), height=float(y[k])) for k in peaks))


def measure_central_width(spec: Spectrum, depth_threshold: float = DEPTH_THRESHOLD,
                          min_points: int = MIN_POINTS_PER_FEATURE) -> float:
    """FWHM of the transparency feature sitting at zero detuning.

    Free space: the central dip.  Cavity: the central (EIT) peak.
    """
    report = detect_windows(spec, depth_threshold, check_resolution=False)
    step = spec.grid.step
    central = [w for w in report.windows if abs(w.center) <= step * (1 + 1e-9)]
    if not central:
        raise NoCentralWindowError("no transparency window at zero detuning")
    width = central[0].fwhm
    if width < min_points * step:
        suggested = _suggest_count(spec.grid, width, min_points)
        raise UnderResolvedError(
            f"central window of width {width:.3g} is under-resolved; "
            f"use at least {suggested} points", suggested)
    return width


def uniform_chain(n: int, d0: float, d: float, gamma0: float = 1.0,
                  gamma: float = 1e-3, omega_p: float = 0.03) -> ChainParams:
    return ChainParams.uniform(n, d0, d, gamma0, gamma, omega_p)


def verify_window_count(n_values: Iterable[int], d0: float,
                        d_rule: Callable[[float], float] = lambda d0: d0 / math.sqrt(2),
                        gamma: float = 1e-4, gamma0: float = 1.0, omega_p: float = 0.03,
                        grid: DetuningGrid = DetuningGrid(-3.0, 3.0, 8001),
                        backend: Backend | str = Backend.GENERAL) -> list[tuple[int, int]]:
    """(N, detected window count) for uniform free-space chains."""
    table = []
    for n in n_values:
        params = uniform_chain(n, d0, d_rule(d0), gamma0, gamma, omega_p)
        table.append((n, detect_windows(sweep(params, grid, backend)).count))
    return table


def dark_resonances(params: ChainParams) -> np.ndarray:
    """Detunings where a lossless tail makes the main TLS transparent."""
    return np.linalg.eigvalsh(tail_coupling_matrix(params))


def depth_table(params: ChainParams, gammas: Iterable[float],
                grid: DetuningGrid) -> list[tuple[float, tuple[float, ...]]]:
    """Window depths as the (uniform) tail decay rate is varied."""
    rows = []
    for gm in gammas:
        p = params.replace(gamma_tail=(gm,) * params.n_extra)
        rows.append((gm, tuple(w.depth for w in detect_windows(sweep(p, grid)).windows)))
    return rows


def symmetry_deviation(spec: Spectrum) -> tuple[float, float]:
    """Max deviations of absorption from even and dispersion from odd symmetry.

    The grid must be symmetric about zero.
    """
    g = spec.grid
    if not math.isclose(g.start, -g.stop, rel_tol=0, abs_tol=1e-12 * abs(g.stop)):
        raise ValueError("symmetry check needs a grid symmetric about zero")
    a, disp = spec.absorption, spec.dispersion
    return (float(np.max(np.abs(a - a[::-1]))), float(np.max(np.abs(disp + disp[::-1]))))
