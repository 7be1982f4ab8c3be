"""Weak-drive (linearized) steady state of the chain, free space and cavity.

With <sigma_z^j> pinned to -1 the equations of motion for the coherences
close into a complex symmetric tridiagonal system, solved here by the
pivot-free Thomas recurrence in O(N).  The response solvers only need the
first unknown and eliminate from the far end of the chain with O(1) memory;
the full coherence vector uses the textbook forward/backward sweep.  Every
routine accepts a scalar detuning or a 1-D array of detunings; arrays are
solved column-wise in one sweep over the chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CavityParams, ChainParams, validate

# pivots smaller than this (relative to the row scale) are treated as zero
PIVOT_RTOL = 64 * np.finfo(float).eps


class SingularSystemError(ArithmeticError):
    """The tridiagonal elimination met a zero pivot.

    Only possible when a lossless segment of the chain is driven exactly at
    one of its eigenvalues.  ``grid_index`` identifies the offending column
    when several detunings were solved together.
    """

    def __init__(self, message: str, grid_index: int | None = None,
                 row: int | None = None):
        self.grid_index = grid_index
        self.row = row
        super().__init__(message)


@dataclass(frozen=True)
class TridiagonalSystem:
    """Symmetric tridiagonal system ``M x = rhs``.

    Arrays are shaped (n,) for one detuning or (n, m) for m detunings;
    ``off`` has one row fewer than ``diag``.
    """

    diag: np.ndarray
    off: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        if self.off.shape[0] != self.diag.shape[0] - 1:
            raise ValueError("off-diagonal must be one shorter than diagonal")
        if self.rhs.shape != self.diag.shape:
            raise ValueError("rhs shape must match diagonal")

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        """Dense matrix (single-detuning systems only)."""
        if self.diag.ndim != 1:
            raise ValueError("dense() needs a single-detuning system")
        return (np.diag(self.diag) + np.diag(self.off, 1)
                + np.diag(self.off, -1))

    def solve(self) -> np.ndarray:
        return thomas_solve(self.diag, self.off, self.rhs)


def thomas_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a symmetric tridiagonal system by forward elimination and back
    substitution, without pivoting.

    Raises SingularSystemError on a (numerically) zero pivot.
    """
    n = diag.shape[0]
    single = diag.ndim == 1
    # python complex scalars are much faster than 0-d arrays in the loop
    dg = diag.tolist() if single else list(diag)
    of = off.tolist() if single else list(off)
    rh = rhs.tolist() if single else list(rhs)

    cprime = [None] * n
    dprime = [None] * n
    pivots = [None] * n
    with np.errstate(divide="ignore", invalid="ignore"):
        try:
            pivot = dg[0]
            pivots[0] = pivot
            cprime[0] = of[0] / pivot if n > 1 else 0.0
            dprime[0] = rh[0] / pivot
            for i in range(1, n):
                pivot = dg[i] - of[i - 1] * cprime[i - 1]
                pivots[i] = pivot
                if i < n - 1:
                    cprime[i] = of[i] / pivot
                dprime[i] = (rh[i] - of[i - 1] * dprime[i - 1]) / pivot
        except ZeroDivisionError:
            i = next(k for k, p in enumerate(pivots) if p is not None and p == 0)
            raise SingularSystemError(
                f"zero pivot at row {i}: lossless segment driven on resonance",
                grid_index=None if single else 0, row=i) from None

    _check_pivots(np.asarray(pivots), np.abs(diag), np.abs(off), single)

    x = [None] * n
    x[n - 1] = dprime[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dprime[i] - cprime[i] * x[i + 1]
    return np.array(x, dtype=complex)


def _check_pivots(pivots: np.ndarray, adiag: np.ndarray, aoff: np.ndarray,
                  single: bool):
    scale = adiag.copy()
    if aoff.shape[0]:
        scale[:-1] += aoff
        scale[1:] += aoff
    bad = ~(np.abs(pivots) > PIVOT_RTOL * scale)
    if not bad.any():
        return
    if single:
        row = int(np.argmax(bad))
        raise SingularSystemError(
            f"zero pivot at row {row}: lossless segment driven on resonance",
            row=row)
    col = int(np.argmax(bad.any(axis=0)))
    row = int(np.argmax(bad[:, col]))
    raise SingularSystemError(
        f"zero pivot at row {row} for grid index {col}: "
        "lossless segment driven on resonance",
        grid_index=col, row=row)


def _broadcast(column: np.ndarray, delta: np.ndarray) -> np.ndarray:
    if delta.ndim == 0:
        return column
    return np.broadcast_to(column[:, None], column.shape + delta.shape).copy()


def assemble_free_space(params: ChainParams, delta_p) -> TridiagonalSystem:
    """Linear system for s_j = <sigma_+^j>, j = 0..N.

    Row j reads (i delta_p - gamma_j) s_j + i d_{j-1} s_{j-1} + i d_j s_{j+1},
    equal to -i Omega_p on row 0 and 0 elsewhere.
    """
    delta = np.asarray(delta_p, dtype=float)
    gammas = params.decay_rates
    if delta.ndim == 0:
        diag = 1j * float(delta) - gammas
    else:
        diag = 1j * delta[None, :] - gammas[:, None]
    off = _broadcast(1j * params.couplings, delta)
    rhs = np.zeros(params.n_sites, dtype=complex)
    rhs[0] = -1j * params.omega_p
    return TridiagonalSystem(diag, off, _broadcast(rhs, delta))


def assemble_cavity(params: CavityParams, delta_p) -> TridiagonalSystem:
    """Linear system for (<a>, <sigma_-^0>, ..., <sigma_-^N>).

    Rows follow the cavity equations of motion with <sigma_z> = -1:
    -i(delta_p - i kappa) a - i g s_0 = i epsilon, and
    -i(delta_p - i gamma_j) s_j - i (neighbour couplings) = 0.
    """
    delta = np.asarray(delta_p, dtype=float)
    chain = params.chain
    rates = np.concatenate(([params.kappa], chain.decay_rates))
    if delta.ndim == 0:
        diag = -1j * (float(delta) - 1j * rates)
    else:
        diag = -1j * (delta[None, :] - 1j * rates[:, None])
    couplings = np.concatenate(([params.g], chain.couplings))
    off = _broadcast(-1j * couplings, delta)
    rhs = np.zeros(chain.n_sites + 1, dtype=complex)
    rhs[0] = 1j * params.epsilon
    return TridiagonalSystem(diag, off, _broadcast(rhs, delta))


def _first_unknown(zeta, rates, couplings, rhs0):
    """x_0 of the system diag_k = zeta - rates[k], off_k^2 = -couplings[k]^2,
    right-hand side rhs0 on row 0 only.

    Elimination runs from the far end of the chain towards row 0, so only
    O(1) state is kept.  The running pivot t_k = p/q is carried as a
    normalized projective pair; an infinite pivot (q = 0) is how an exact
    dark resonance shows up and propagates correctly.  ``zeta`` may be a
    scalar or an array of detunings.
    """
    n = len(rates)
    p = zeta - rates[n - 1]
    q = 1.0 if np.ndim(zeta) == 0 else np.ones_like(p)
    single = np.ndim(zeta) == 0
    for k in range(n - 2, -1, -1):
        c = couplings[k]
        p_next = (zeta - rates[k]) * p + c * c * q
        if k == 0:
            scale = abs(zeta - rates[0]) * abs(p) + c * c * abs(q)
            p, q = p_next, p
            break
        p, q = p_next, p
        r = abs(p) + abs(q)
        if single:
            if r == 0:
                raise SingularSystemError(
                    f"zero pivot at row {k}: lossless segment driven on resonance", row=k)
        elif not r.all():
            col = int(np.argmin(r))
            raise SingularSystemError(
                f"zero pivot at row {k} for grid index {col}: "
                "lossless segment driven on resonance", grid_index=col, row=k)
        p = p / r
        q = q / r
    else:
        scale = abs(p) + abs(zeta - rates[0])
    bad = ~(abs(p) > PIVOT_RTOL * scale)
    if single and bad:
        raise SingularSystemError(
            "zero pivot at row 0: lossless segment driven on resonance", row=0)
    if not single and bad.any():
        col = int(np.argmax(bad))
        raise SingularSystemError(
            f"zero pivot at row 0 for grid index {col}: lossless segment driven on resonance",
            grid_index=col, row=0)
    return rhs0 * q / p


def solve_free_space(params: ChainParams, delta_p, *, check: bool = True):
    """Steady-state <sigma_+^0> for one detuning or an array of detunings."""
    if check:
        validate(params)
    delta = np.asarray(delta_p, dtype=float)
    zeta = 1j * float(delta) if delta.ndim == 0 else 1j * delta
    rates = (params.gamma0,) + params.gamma_tail
    couplings = (params.d0,) + params.d_tail if params.n_extra else ()
    x0 = _first_unknown(zeta, rates, couplings, -1j * params.omega_p)
    return complex(x0) if delta.ndim == 0 else x0


def solve_cavity(params: CavityParams, delta_p, *, check: bool = True):
    """Steady-state <a> for one detuning or an array of detunings."""
    if check:
        validate(params)
    chain = params.chain
    delta = np.asarray(delta_p, dtype=float)
    zeta = -1j * float(delta) if delta.ndim == 0 else -1j * delta
    rates = (params.kappa, chain.gamma0) + chain.gamma_tail
    couplings = (params.g, chain.d0) + chain.d_tail if chain.n_extra else (params.g,)
    x0 = _first_unknown(zeta, rates, couplings, 1j * params.epsilon)
    return complex(x0) if delta.ndim == 0 else x0


def free_space_coherences(params: ChainParams, delta_p) -> np.ndarray:
    """All site coherences <sigma_+^j> (useful for inspecting dark states)."""
    validate(params)
    return assemble_free_space(params, delta_p).solve()
