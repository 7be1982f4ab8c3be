"""Parameter records shared by every solver.

All rates are absolute; figures are reproduced by setting the scale rate
(``gamma0`` in free space, ``kappa`` in the cavity) to 1.  Only the probe
detuning ``delta_p = omega_0 - omega_p`` survives the rotating frame, so no
bare frequencies are stored.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


class ParameterError(ValueError):
    """A parameter record violates one of its invariants."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def _as_tuple(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class ChainParams:
    """Driven main TLS (index 0) followed by ``n_extra`` dipole-coupled TLS's.

    ``d0`` couples sites 0 and 1, ``d_tail[j-1]`` couples sites j and j+1, and
    ``gamma_tail[j-1]`` is the amplitude decay rate of site j.  ``omega_p`` is
    half the probe Rabi frequency.
    """

    n_extra: int
    d0: float
    d_tail: tuple[float, ...]
    gamma0: float
    gamma_tail: tuple[float, ...]
    omega_p: float

    def __post_init__(self):
        object.__setattr__(self, "d_tail", _as_tuple(self.d_tail))
        object.__setattr__(self, "gamma_tail", _as_tuple(self.gamma_tail))

    @classmethod
    def uniform(cls, n_extra: int, d0: float, d: float, gamma0: float,
                gamma: float, omega_p: float) -> "ChainParams":
        """Chain with one tail coupling ``d`` and one tail decay rate ``gamma``."""
        return cls(
            n_extra=n_extra,
            d0=d0,
            d_tail=(d,) * max(n_extra - 1, 0),
            gamma0=gamma0,
            gamma_tail=(gamma,) * n_extra,
            omega_p=omega_p,
        )

    @property
    def n_sites(self) -> int:
        return self.n_extra + 1

    @property
    def couplings(self) -> np.ndarray:
        """All nearest-neighbour couplings ``d_0, d_1, ..., d_{N-1}``."""
        if self.n_extra == 0:
            return np.zeros(0)
        return np.array((self.d0,) + self.d_tail)

    @property
    def decay_rates(self) -> np.ndarray:
        """Decay rates ``gamma_0, ..., gamma_N``."""
        return np.array((self.gamma0,) + self.gamma_tail)

    def uniform_tail_coupling(self) -> float | None:
        """The common tail coupling, or None if the tail is not uniform."""
        if not self.d_tail:
            return None
        first = self.d_tail[0]
        return first if all(v == first for v in self.d_tail) else None

    def replace(self, **changes) -> "ChainParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class CavityParams:
    """Chain whose main TLS couples (rate ``g``) to a driven cavity mode.

    ``chain.omega_p`` is ignored; the cavity is driven with strength
    ``epsilon``.  ``n_max`` is the Fock cutoff used only by the Lindblad oracle.
    """

    chain: ChainParams
    g: float
    kappa: float
    epsilon: float
    n_max: int = 2

    def replace(self, **changes) -> "CavityParams":
        return dataclasses.replace(self, **changes)


Params = Union[ChainParams, CavityParams]


@dataclass(frozen=True)
class DetuningGrid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ParameterError("grid", "bounds must be finite")
        if not self.start < self.stop:
            raise ParameterError("grid", "start must be below stop")
        if int(self.count) != self.count or self.count < 2:
            raise ParameterError("grid", "count must be an integer >= 2")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.count - 1)


class SpectrumKind(enum.Enum):
    FREE_SPACE = "free_space"
    CAVITY = "cavity"


@dataclass(frozen=True)
class Spectrum:
    """Complex steady-state response on a detuning grid.

    ``values`` holds <sigma_+^0> (free space) or <a> (cavity) with the sign
    conventions of the equations of motion; ``norm`` is the bare resonance
    peak (Omega_p/gamma0 or epsilon/kappa).
    """

    grid: DetuningGrid
    values: np.ndarray
    kind: SpectrumKind
    norm: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.count,):
            raise ParameterError("values", "length must equal grid count")
        if not self.norm > 0:
            raise ParameterError("norm", "must be positive")

    @property
    def detuning(self) -> np.ndarray:
        return self.grid.values

    @property
    def normalized(self) -> np.ndarray:
        return self.values / self.norm

    @property
    def absorption(self) -> np.ndarray:
        """Normalized absorption oriented so that the bare resonance is +1.

        Free space: Im<sigma_+^0>/norm.  Cavity: -Im<a>/norm, because with a
        real positive drive the empty cavity gives <a> = -i epsilon/kappa.
        """
        sign = 1.0 if self.kind is SpectrumKind.FREE_SPACE else -1.0
        return sign * self.values.imag / self.norm

    @property
    def dispersion(self) -> np.ndarray:
        sign = 1.0 if self.kind is SpectrumKind.FREE_SPACE else -1.0
        return sign * self.values.real / self.norm


@dataclass(frozen=True)
class EigenSystem:
    """Single-excitation eigenpairs, energies ascending.

    ``energies`` are measured from the ground state: each excitation costs
    ``delta_p`` and the coupling eigenvalue ``lambda_k`` is added on top.
    ``ground_energy`` is the absolute ground-state energy -(N+1)*delta_p/2
    of the rotating-frame Hamiltonian.
    """

    energies: np.ndarray
    vectors: np.ndarray  # row k is the amplitude vector of eigenstate k
    ground_energy: float = 0.0


@dataclass(frozen=True)
class RateSet:
    """Golden-rule decay rates, index-aligned with ``energies``."""

    rates: np.ndarray
    energies: np.ndarray | None = None


@dataclass(frozen=True)
class Window:
    center: float
    depth: float
    fwhm: float
    asymmetry: float = 0.0


@dataclass(frozen=True)
class Peak:
    center: float
    height: float


@dataclass(frozen=True)
class WindowReport:
    windows: tuple[Window, ...] = field(default_factory=tuple)
    peaks: tuple[Peak, ...] = field(default_factory=tuple)

    @property
    def count(self) -> int:
        return len(self.windows)


def _check_rate(name: str, value: float, positive: bool = False):
    if not math.isfinite(value):
        raise ParameterError(name, "must be finite")
    if positive and not value > 0:
        raise ParameterError(name, f"{name} must be positive")
    if value < 0:
        raise ParameterError(name, f"{name} must be non-negative")


def _check_rates(name: str, values: tuple[float, ...]):
    # vectorized scan; the scalar check only runs to word the first failure
    arr = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0))
    if bad.size:
        j = int(bad[0])
        _check_rate(f"{name}[{j + 1}]", values[j])


def validate(params: Params) -> Params:
    """Return ``params`` unchanged if every invariant holds.

    Raises ParameterError naming the first offending field.
    """
    if isinstance(params, CavityParams):
        validate(params.chain)
        _check_rate("g", params.g)
        _check_rate("kappa", params.kappa, positive=True)
        _check_rate("epsilon", params.epsilon, positive=True)
        if int(params.n_max) != params.n_max or params.n_max < 1:
            raise ParameterError("n_max", "must be an integer >= 1")
        return params
    if not isinstance(params, ChainParams):
        raise TypeError(f"cannot validate {type(params).__name__}")

    n = params.n_extra
    if int(n) != n or n < 0:
        raise ParameterError("n_extra", "must be an integer >= 0")
    _check_rate("gamma0", params.gamma0, positive=True)
    _check_rate("d0", params.d0)
    if len(params.d_tail) != max(n - 1, 0):
        raise ParameterError(
            "d_tail",
            f"length mismatch: expected {max(n - 1, 0)}, got {len(params.d_tail)}")
    if len(params.gamma_tail) != n:
        raise ParameterError(
            "gamma_tail",
            f"length mismatch: expected {n}, got {len(params.gamma_tail)}")
    _check_rates("d_tail", params.d_tail)
    _check_rates("gamma_tail", params.gamma_tail)
    _check_rate("omega_p", params.omega_p, positive=True)
    return params
