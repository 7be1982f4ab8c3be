"""Compiled-in parameter sets for the reference figures.

Free-space presets are in units of gamma0, cavity presets in units of kappa.
Grids are chosen wide enough to contain every peak and fine enough for the
window detector's resolution guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import CavityParams, ChainParams, DetuningGrid, Params


@dataclass(frozen=True)
class Preset:
    name: str
    params: Params
    grid: DetuningGrid
    description: str
    # coupling range scanned by `rates --scan-d` when no range is given
    scan: tuple[float, float, int] | None = None


def _fs(n: int, d0: float, d: float, gamma: float = 1e-3,
        omega_p: float = 0.03) -> ChainParams:
    return ChainParams.uniform(n, d0, d, 1.0, gamma, omega_p)


def _cav(n: int, d: float, g: float, gamma0: float, gamma: float = 1e-3,
         epsilon: float = 0.03) -> CavityParams:
    # the cavity figures use one coupling d along the whole chain
    chain = ChainParams.uniform(n, d, d, gamma0, gamma, 1.0)
    return CavityParams(chain=chain, g=g, kappa=1.0, epsilon=epsilon)


_D0 = 0.5
_EQUAL_RATES = _D0 / math.sqrt(2)

_PRESETS = [
    Preset("fig2a", _fs(1, _D0, 0.0), DetuningGrid(-3.0, 3.0, 2001),
           "single tail TLS, narrow transparency window"),
    Preset("fig2b", CavityParams(ChainParams.uniform(1, 3.0, 0.0, 1.0, 1e-3, 1.0),
                                 g=5.0, kappa=1.0, epsilon=0.03),
           DetuningGrid(-8.0, 8.0, 4001),
           "cavity with two coupled TLS's, outer polaritons at +-sqrt(g^2+d^2)"),
    Preset("fig3b", _fs(2, _D0, _EQUAL_RATES), DetuningGrid(-3.0, 3.0, 2001),
           "N=2 eigenenergies and rates versus d", scan=(0.05, 1.2, 200)),
    Preset("fig3d", _fs(4, _D0, _EQUAL_RATES), DetuningGrid(-3.0, 3.0, 8001),
           "N=4 eigenenergies and rates versus d", scan=(0.05, 1.2, 200)),
    Preset("fig4a", _fs(2, 0.8, 0.4), DetuningGrid(-3.0, 3.0, 4001),
           "two transparency windows"),
    Preset("fig4b", _fs(2, 2.5, 5.0), DetuningGrid(-8.0, 8.0, 4001),
           "Autler-Townes splitting"),
    Preset("fig4c", _fs(4, _D0, _EQUAL_RATES), DetuningGrid(-3.0, 3.0, 8001),
           "four windows of equal depth and width"),
    Preset("fig4d", _fs(4, _D0, 2.5), DetuningGrid(-8.0, 8.0, 8001),
           "Fano interference"),
    Preset("fig5a", _cav(2, 0.4, 0.8, 0.1), DetuningGrid(-3.0, 3.0, 8001),
           "cavity, two transparency windows"),
    Preset("fig5b", _cav(2, 5.0, 3.0, 0.1), DetuningGrid(-10.0, 10.0, 8001),
           "cavity, Autler-Townes splitting and Fano interference"),
    Preset("fig5c", _cav(4, 0.4, math.sqrt(2) * 0.4, 1e-3), DetuningGrid(-3.0, 3.0, 8001),
           "cavity, four identical windows"),
    Preset("fig5d", _cav(4, 3.0, 2.0, 1e-3), DetuningGrid(-10.0, 10.0, 8001),
           "cavity, multiple Fano interferences"),
]
for _n in (7, 10, 12, 15):
    _PRESETS.append(Preset(f"supp-fs-N{_n}", _fs(_n, _D0, _EQUAL_RATES),
                           DetuningGrid(-1.5, 1.5, 12001),
                           f"free space, N={_n} windows"))
for _n in (7, 10, 12, 15):
    _PRESETS.append(Preset(f"supp-cav-N{_n}", _cav(_n, 1.0, math.sqrt(2), 1e-3, 1e-3),
                           DetuningGrid(-4.0, 4.0, 16001),
                           f"cavity, N={_n} windows"))

PRESETS: dict[str, Preset] = {p.name: p for p in _PRESETS}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
