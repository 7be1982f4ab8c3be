"""Steady-state optics of a driven two-level system coupled to a dipole chain.

Three solution paths cross-check one another: reference closed forms for short
chains, an O(N) tridiagonal solver of the weak-drive equations, and the exact
steady state of the full master equation.
"""

from .analysis import Backend, detect_windows, measure_central_width, sweep
from .model import (CavityParams, ChainParams, DetuningGrid, EigenSystem, ParameterError,
                    RateSet, Spectrum, SpectrumKind, WindowReport, validate)
from .semiclassical import solve_cavity, solve_free_space

__all__ = [
    "Backend", "CavityParams", "ChainParams", "DetuningGrid", "EigenSystem",
    "ParameterError", "RateSet", "Spectrum", "SpectrumKind", "WindowReport",
    "detect_windows", "measure_central_width", "solve_cavity", "solve_free_space",
    "sweep", "validate",
]
