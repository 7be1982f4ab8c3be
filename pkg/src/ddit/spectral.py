"""Single-excitation eigenstates and golden-rule decay rates.

In the one-excitation manifold the coupled chain is a real symmetric
tridiagonal hopping matrix, so eigenpairs come from LAPACK's tridiagonal
solver.  The decay rate of eigenstate k through the main TLS is
gamma0 * |<site 0|psi_k>|^2; the reference closed forms for N = 2, 3, 4 are
kept alongside as an independent check.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .model import CavityParams, ChainParams, EigenSystem, RateSet, validate


def tail_coupling_matrix(params: ChainParams) -> np.ndarray:
    """Hopping matrix of TLS 1..N alone (their dark-resonance positions)."""
    n = params.n_extra
    if n < 1:
        raise ValueError("the chain has no tail (N=0)")
    d = np.asarray(params.d_tail, dtype=float)
    return np.diag(d, 1) + np.diag(d, -1)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # first non-negligible component of each eigenvector made positive
    for row in vectors:
        lead = np.flatnonzero(np.abs(row) > 1e-12)
        if lead.size and row[lead[0]] < 0:
            row *= -1
    return vectors


def _eigensystem(offdiag: np.ndarray, size: int, delta_p: float,
                 ground_energy: float) -> EigenSystem:
    if size == 1:
        lam, vecs = np.zeros(1), np.ones((1, 1))
    else:
        lam, vecs = eigh_tridiagonal(np.zeros(size), offdiag)
    vectors = _fix_signs(np.ascontiguousarray(vecs.T))
    return EigenSystem(energies=delta_p + lam, vectors=vectors,
                       ground_energy=ground_energy)


def single_excitation_eigensystem(params: ChainParams,
                                  delta_p: float = 0.0) -> EigenSystem:
    """Eigenpairs of the one-excitation block over |e g..g>, |g e g..g>, ...

    Energies are relative to the ground state: delta_p + lambda_k.
    """
    validate(params)
    if params.n_extra < 1:
        raise ValueError("need at least one coupled TLS")
    return _eigensystem(params.couplings, params.n_sites, delta_p,
                        -0.5 * params.n_sites * delta_p)


def cavity_eigensystem(params: CavityParams, delta_p: float = 0.0) -> EigenSystem:
    """One-excitation block with the photon state first, then the TLS's."""
    validate(params)
    chain = params.chain
    offdiag = np.concatenate(([params.g], chain.couplings))
    return _eigensystem(offdiag, chain.n_sites + 1, delta_p,
                        -0.5 * chain.n_sites * delta_p)


def transition_rates_numeric(params: ChainParams, eig: EigenSystem) -> RateSet:
    """Gamma_k = gamma0 |v_k[0]|^2."""
    rates = params.gamma0 * np.abs(eig.vectors[:, 0]) ** 2
    return RateSet(rates=rates, energies=eig.energies)


def free_space_rates(params: ChainParams) -> RateSet:
    return transition_rates_numeric(params, single_excitation_eigensystem(params))


def transition_rates_closed(params: ChainParams) -> RateSet:
    """Reference rate formulas for N = 2, 3, 4 with a uniform tail coupling.

    Rates are ordered by ascending energy (Gamma_1g is the lowest state).
    """
    validate(params)
    n = params.n_extra
    if n not in (2, 3, 4):
        raise ValueError(f"closed-form rates exist for N = 2, 3, 4, not {n}")
    d = params.uniform_tail_coupling()
    if d is None:
        raise ValueError("closed-form rates need a uniform tail coupling")
    d0 = params.d0
    if n == 2:
        g2 = d ** 2 / (d0 ** 2 + d ** 2)
        g1 = d0 ** 2 / (2 * (d ** 2 + d0 ** 2))
        rates = [g1, g2, g1]
    elif n == 3:
        # the reference root reads sqrt(4d^2 + d0^2); the characteristic polynomial
        # lambda^4 - (d0^2 + 2d^2) lambda^2 + d0^2 d^2 gives sqrt(4d^4 + d0^4)
        root = math.sqrt(4 * d ** 4 + d0 ** 4)
        inner = (2 * d ** 2 - d0 ** 2 + root) / (4 * root)
        outer = (-2 * d ** 2 + d0 ** 2 + root) / (4 * root)
        rates = [outer, inner, inner, outer]
    else:
        c = math.sqrt(5 * d ** 4 - 2 * d ** 2 * d0 ** 2 + d0 ** 4)
        g3 = d ** 2 / (d ** 2 + 2 * d0 ** 2)
        g2 = d0 ** 2 * (2 * d ** 2 - d0 ** 2 + c) / (2 * (d ** 2 + 2 * d0 ** 2) * c)
        g1 = d0 ** 2 * (-2 * d ** 2 + d0 ** 2 + c) / (2 * (d ** 2 + 2 * d0 ** 2) * c)
        rates = [g1, g2, g3, g2, g1]
    return RateSet(rates=params.gamma0 * np.array(rates))


def cavity_transition_rates(params: CavityParams, prefactor: float | None = None,
                            closed: bool = False) -> RateSet:
    """Gamma_k = prefactor * |<photon|psi_k>|^2 over the photon+chain block.

    ``prefactor`` defaults to gamma0, the reference choice; kappa is the
    physically expected one for photon loss.  ``closed=True`` evaluates the
    reference N = 2, 3 formulas (uniform coupling d0 = d required).
    """
    validate(params)
    chain = params.chain
    pref = chain.gamma0 if prefactor is None else prefactor
    eig = cavity_eigensystem(params)
    if not closed:
        return RateSet(rates=pref * np.abs(eig.vectors[:, 0]) ** 2,
                       energies=eig.energies)
    n = chain.n_extra
    if n not in (2, 3):
        raise ValueError(f"closed-form cavity rates exist for N = 2, 3, not {n}")
    d = chain.d0
    if chain.uniform_tail_coupling() != d:
        raise ValueError("closed-form cavity rates need d0 equal to the tail coupling")
    g = params.g
    if n == 2:
        root = math.sqrt(4 * d ** 4 + g ** 4)
        g1 = d ** 2 * g ** 2 / (4 * d ** 4 + g ** 4 + (2 * d ** 2 - g ** 2) * root)
        g2 = d ** 2 * g ** 2 / (4 * d ** 4 + g ** 4 + (g ** 2 - 2 * d ** 2) * root)
        rates = [g1, g2, g2, g1]
    else:
        c = math.sqrt(5 * d ** 4 - 2 * d ** 2 * g ** 2 + g ** 4)
        g3 = d ** 2 / (d ** 2 + 2 * g ** 2)
        g1 = g ** 2 * (g ** 2 - 2 * d ** 2 + c) / (2 * c * (d ** 2 + 2 * g ** 2))
        g2 = g ** 2 * (2 * d ** 2 - g ** 2 + c) / (2 * c * (d ** 2 + 2 * g ** 2))
        rates = [g1, g2, g3, g2, g1]
    return RateSet(rates=pref * np.array(rates), energies=eig.energies)


@dataclass(frozen=True)
class Crossing:
    d: float
    pairs: tuple[tuple[int, int], ...]  # 0-based rate indices that coincide


def rate_crossing_scan(template, d_start: float, d_stop: float, samples: int,
                       closed: bool = False, rtol: float = 1e-8) -> list[Crossing]:
    """Locate every d where two decay rates become equal.

    ``template`` is a ChainParams (tail coupling d is scanned, d0 fixed) or a
    CavityParams (the uniform coupling d0 = d is scanned, g fixed).  Pairs
    that coincide over the whole scan (symmetric partners) are ignored;
    crossings are refined by bisection to ``rtol`` relative in d.
    """
    if not d_start < d_stop or samples < 2:
        raise ValueError("empty scan range")

    def rates_at(d: float) -> np.ndarray:
        if isinstance(template, CavityParams):
            chain = template.chain
            p = template.replace(chain=chain.replace(
                d0=d, d_tail=(d,) * len(chain.d_tail)))
            return cavity_transition_rates(p, closed=closed).rates
        p = template.replace(d_tail=(d,) * len(template.d_tail))
        if closed:
            return transition_rates_closed(p).rates
        return free_space_rates(p).rates

    ds = np.linspace(d_start, d_stop, samples)
    table = np.array([rates_at(d) for d in ds])
    scale = np.max(np.abs(table))
    found: dict[float, set] = {}
    for i, j in itertools.combinations(range(table.shape[1]), 2):
        diff = table[:, i] - table[:, j]
        if np.all(np.abs(diff) <= 1e-9 * scale):
            continue
        for k in range(samples - 1):
            lo_v, hi_v = diff[k], diff[k + 1]
            if lo_v == 0 or lo_v * hi_v > 0:
                continue
            lo, hi = ds[k], ds[k + 1]
            while hi - lo > rtol * abs(hi):
                mid = 0.5 * (lo + hi)
                r = rates_at(mid)
                val = r[i] - r[j]
                if val == 0:
                    lo = hi = mid
                    break
                if (val > 0) == (lo_v > 0):
                    lo = mid
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
            key = next((x for x in found if abs(x - root) <= 10 * rtol * abs(root)), root)
            found.setdefault(key, set()).add((i, j))
    return [Crossing(d, tuple(sorted(found[d]))) for d in sorted(found)]


class Regime(enum.Enum):
    EIT = "eit"
    FANO = "fano"
    AUTLER_TOWNES = "autler_townes"


def classify_regime(params: ChainParams) -> Regime:
    """Heuristic regime from adjacent level spacings against gamma0.

    All spacings below gamma0: interference (EIT-like).  All above: resolved
    Autler-Townes doublets.  Otherwise mixed, where Fano asymmetry appears.
    """
    gaps = np.diff(single_excitation_eigensystem(params).energies)
    if np.max(gaps) < params.gamma0:
        return Regime.EIT
    if np.min(gaps) > params.gamma0:
        return Regime.AUTLER_TOWNES
    return Regime.FANO
