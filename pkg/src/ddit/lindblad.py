"""Exact steady state of the full master equation (the reference oracle).

The Liouvillian acts on column-stacked density matrices,
vec(A rho B) = (B^T kron A) vec(rho).  Hilbert space ordering is
[cavity Fock space] x TLS_0 x TLS_1 x ... with each TLS in the basis (g, e).
Dense linear algebra only; dimension caps keep the D^2 x D^2 superoperator
in memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .model import CavityParams, ChainParams, Params, validate

MAX_FREE_SPACE_N = 6
MAX_CAVITY_DIM = 64

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_FLOOR = -1e-8
RESIDUAL_RTOL = 1e-10
RCOND_FLOOR = 1e-13

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)


class OracleCapError(ValueError):
    pass


class SteadyStateError(ArithmeticError):
    pass


@dataclass(frozen=True)
class HilbertLayout:
    n_sites: int
    n_fock: int | None = None  # number of Fock levels (n_max + 1), None in free space

    @property
    def dims(self) -> tuple[int, ...]:
        head = (self.n_fock,) if self.n_fock else ()
        return head + (2,) * self.n_sites

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def embed(self, op: np.ndarray, slot: int) -> np.ndarray:
        """Place ``op`` on tensor factor ``slot`` (cavity is slot 0 if present)."""
        factors = [np.eye(n, dtype=complex) for n in self.dims]
        factors[slot] = op
        return reduce(np.kron, factors)

    def sigma_minus(self, site: int) -> np.ndarray:
        return self.embed(SIGMA_MINUS, site + (1 if self.n_fock else 0))

    def sigma_z(self, site: int) -> np.ndarray:
        return self.embed(SIGMA_Z, site + (1 if self.n_fock else 0))

    def annihilation(self) -> np.ndarray:
        if not self.n_fock:
            raise ValueError("free-space layout has no cavity mode")
        a = np.diag(np.sqrt(np.arange(1, self.n_fock)), 1).astype(complex)
        return self.embed(a, 0)


@dataclass(frozen=True)
class Liouvillian:
    dim: int
    matrix: np.ndarray
    layout: HilbertLayout

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d rho/dt for a D x D density matrix."""
        flat = self.matrix @ rho.reshape(-1, order="F")
        return flat.reshape(self.dim, self.dim, order="F")


@dataclass(frozen=True)
class DensityMatrix:
    dim: int
    entries: np.ndarray
    layout: HilbertLayout | None = None

    def check(self):
        """Raise SteadyStateError unless Hermitian, unit trace and positive."""
        rho = self.entries
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > HERMITIAN_TOL:
            raise SteadyStateError(f"density matrix not Hermitian ({herm:.2e})")
        tr = np.trace(rho)
        if abs(tr - 1) > TRACE_TOL:
            raise SteadyStateError(f"trace {tr} differs from 1")
        low = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if low < POSITIVITY_FLOOR:
            raise SteadyStateError(f"negative eigenvalue {low:.2e}")
        return self


def _validate_allow_zero_drive(params: Params):
    """Model validation, except that a zero drive is allowed here.

    The oracle never divides by the drive, and the undriven steady state
    (the ground state) is a useful exact check.
    """
    if isinstance(params, CavityParams):
        if params.epsilon == 0:
            params = params.replace(epsilon=1.0)
        if params.chain.omega_p == 0:
            params = params.replace(chain=params.chain.replace(omega_p=1.0))
    elif isinstance(params, ChainParams) and params.omega_p == 0:
        params = params.replace(omega_p=1.0)
    validate(params)


def _dissipator(c: np.ndarray, rate: float) -> np.ndarray:
    eye = np.eye(c.shape[0], dtype=complex)
    cdc = c.conj().T @ c
    return rate * (2 * np.kron(c.conj(), c) - np.kron(eye, cdc) - np.kron(cdc.T, eye))


def _liouvillian(h: np.ndarray, jumps) -> np.ndarray:
    eye = np.eye(h.shape[0], dtype=complex)
    out = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c, rate in jumps:
        if rate:
            out += _dissipator(c, rate)
    return out


def _chain_hamiltonian(layout: HilbertLayout, chain: ChainParams, delta_p: float):
    sm = [layout.sigma_minus(i) for i in range(layout.n_sites)]
    h = sum(0.5 * delta_p * layout.sigma_z(i) for i in range(layout.n_sites))
    for i, d in enumerate(chain.couplings):
        hop = d * sm[i] @ sm[i + 1].conj().T
        h = h + hop + hop.conj().T
    return h, sm


def build_liouvillian_free(params: ChainParams, delta_p: float,
                           max_n: int = MAX_FREE_SPACE_N) -> Liouvillian:
    """Superoperator of the free-space master equation at one detuning.

    H = sum_i delta/2 sigma_z^i + sum_i d_i (sigma_-^i sigma_+^{i+1} + h.c.)
        + Omega_p (sigma_+^0 + sigma_-^0),
    with dissipators gamma_i (2 s rho s+ - s+ s rho - rho s+ s).
    """
    _validate_allow_zero_drive(params)
    if params.n_extra > max_n:
        raise OracleCapError(
            f"N={params.n_extra} exceeds the oracle cap of {max_n} "
            f"(superoperator would be {4 ** params.n_sites} square)")
    layout = HilbertLayout(params.n_sites)
    h, sm = _chain_hamiltonian(layout, params, delta_p)
    h = h + params.omega_p * (sm[0] + sm[0].conj().T)
    jumps = list(zip(sm, params.decay_rates))
    return Liouvillian(layout.dim, _liouvillian(h, jumps), layout)


def build_liouvillian_cavity(params: CavityParams, delta_p: float,
                             max_dim: int = MAX_CAVITY_DIM) -> Liouvillian:
    """Superoperator with the driven, damped cavity mode coupled to TLS 0."""
    _validate_allow_zero_drive(params)
    chain = params.chain
    layout = HilbertLayout(chain.n_sites, params.n_max + 1)
    if layout.dim > max_dim:
        raise OracleCapError(
            f"Hilbert dimension {layout.dim} exceeds the oracle cap of {max_dim}")
    h, sm = _chain_hamiltonian(layout, chain, delta_p)
    a = layout.annihilation()
    h = (h + delta_p * a.conj().T @ a
         + params.g * (a @ sm[0].conj().T + a.conj().T @ sm[0])
         + params.epsilon * (a + a.conj().T))
    jumps = list(zip(sm, chain.decay_rates)) + [(a, params.kappa)]
    return Liouvillian(layout.dim, _liouvillian(h, jumps), layout)


def steady_state(liouvillian: Liouvillian) -> DensityMatrix:
    """Stationary density matrix, with the trace condition replacing row 0."""
    dim = liouvillian.dim
    lmat = liouvillian.matrix
    system = lmat.copy()
    system[0, :] = 0
    system[0, np.arange(dim) * (dim + 1)] = 1
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1

    anorm = np.max(np.sum(np.abs(system), axis=0))
    lu, piv = sla.lu_factor(system, check_finite=False)
    rcond, _ = lapack.zgecon(lu, anorm, norm="1")
    if rcond < RCOND_FLOOR:
        raise SteadyStateError(
            f"stationary state not unique (reciprocal condition {rcond:.1e})")
    vec = sla.lu_solve((lu, piv), rhs, check_finite=False)

    residual = np.linalg.norm(lmat @ vec)
    if residual > RESIDUAL_RTOL * np.linalg.norm(lmat):
        raise SteadyStateError(f"steady-state residual too large ({residual:.2e})")
    rho = vec.reshape(dim, dim, order="F")
    DensityMatrix(dim, rho).check()
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(dim, rho, liouvillian.layout)


OBSERVABLES = ("sigma_plus_0", "a")


def expectation(rho: DensityMatrix, observable) -> complex:
    """Tr(rho O) for an operator matrix or one of ``OBSERVABLES``."""
    if isinstance(observable, str):
        if rho.layout is None:
            raise ValueError("named observables need a density matrix with a layout")
        if observable == "sigma_plus_0":
            op = rho.layout.sigma_minus(0).conj().T
        elif observable == "a":
            op = rho.layout.annihilation()
        else:
            raise ValueError(f"unknown observable {observable!r}")
    else:
        op = np.asarray(observable)
    if op.shape != (rho.dim, rho.dim):
        raise ValueError(
            f"observable shape {op.shape} does not match dimension {rho.dim}")
    return complex(np.trace(rho.entries @ op))


def oracle_response(params: Params, delta_p, **caps):
    """<sigma_+^0> (free space) or <a> (cavity) from the exact steady state."""
    deltas = np.atleast_1d(np.asarray(delta_p, dtype=float))
    out = np.empty(deltas.shape, dtype=complex)
    for k, dp in enumerate(deltas):
        if isinstance(params, CavityParams):
            rho = steady_state(build_liouvillian_cavity(params, dp, **caps))
            out[k] = expectation(rho, "a")
        else:
            rho = steady_state(build_liouvillian_free(params, dp, **caps))
            out[k] = expectation(rho, "sigma_plus_0")
    return complex(out[0]) if np.ndim(delta_p) == 0 else out
