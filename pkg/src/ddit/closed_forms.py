"""Reference closed-form steady states for short chains (N = 1..4).

These are independent of the tridiagonal solver and exist to cross-check it.
Each expression keeps the nesting of the reference formula; the few places
where the reference form is inconsistent with its own equations of motion are
marked inline.  Detuning may be a scalar or an array.
"""

from __future__ import annotations

import numpy as np

from .model import CavityParams, ChainParams, validate

SUPPORTED_N = (1, 2, 3, 4)


class UnsupportedChainError(ValueError):
    pass


def _tail_d(chain: ChainParams) -> float:
    if chain.n_extra <= 1:
        return 0.0
    d = chain.uniform_tail_coupling()
    if d is None:
        raise UnsupportedChainError(
            "closed forms need a uniform tail coupling d_1 = ... = d_{N-1}")
    return d


def closed_form_free_space(params: ChainParams, delta_p):
    """<sigma_+^0> from the reference expression for N in {1, 2, 3, 4}."""
    validate(params)
    n = params.n_extra
    if n not in SUPPORTED_N:
        raise UnsupportedChainError(f"no closed form for N={n}; need 1..4")
    dp = np.asarray(delta_p, dtype=float)
    om = params.omega_p
    d0 = params.d0
    d = _tail_d(params)
    g0 = params.gamma0
    gt = params.gamma_tail
    I = 1j

    if n == 1:
        g1, = gt
        out = (dp + I * g1) * om / (abs(d0) ** 2 - (dp + I * g0) * (dp + I * g1))
    elif n == 2:
        g1, g2 = gt
        bracket = d ** 2 - (dp + I * g1) * (dp + I * g2)
        out = -om * bracket / ((dp + I * g0) * bracket + d0 ** 2 * (dp + I * g2))
    elif n == 3:
        g1, g2, g3 = gt
        y23 = -d ** 2 + (dp + I * g2) * (dp + I * g3)
        num = I * om * (I * d ** 2 * (dp + I * g3) + (g1 - I * dp) * y23)
        den = (d0 ** 2 * y23
               + (dp + I * g0) * (d ** 2 * (dp + I * g3) - (dp + I * g1) * y23))
        out = num / den
    else:
        g1, g2, g3, g4 = gt
        y34 = -d ** 2 + (dp + I * g3) * (dp + I * g4)
        num = I * om * (d ** 2 * y34
                        + (dp + I * g1) * (d ** 2 * (dp + I * g4)
                                           + (-dp - I * g2) * y34))
        upsilon = (dp + I * g0) * (
            d ** 2 * ((g3 - I * dp) * (dp + I * g4) + I * d ** 2)
            + (dp + I * g1) * (d ** 2 * (g4 - I * dp)
                               + I * (dp + I * g2) * y34))
        den = d0 ** 2 * (I * d ** 2 * (dp + I * g4) + (g2 - I * dp) * y34) + upsilon
        out = num / den
    return complex(out) if out.ndim == 0 else out


def closed_form_cavity(params: CavityParams, delta_p):
    """<a> from the reference cavity expressions for N in {1, 2, 3, 4}.

    The cavity formulas use a single coupling ``d`` along the whole chain, so
    ``chain.d0`` must equal the tail coupling.  The reference N = 2..4 results
    carry the opposite overall sign to the N = 1 result and to the equations
    of motion (their g -> 0 limit is +epsilon/(delta - i kappa)); the sign is
    restored here so every N shares the convention of ``solve_cavity``.
    """
    validate(params)
    chain = params.chain
    n = chain.n_extra
    if n not in SUPPORTED_N:
        raise UnsupportedChainError(f"no closed form for N={n}; need 1..4")
    d = chain.d0
    if n >= 2 and _tail_d(chain) != d:
        raise UnsupportedChainError("cavity closed forms need d0 equal to the tail coupling")
    dp = np.asarray(delta_p, dtype=float)
    eps = params.epsilon
    g = params.g
    zk = dp - 1j * params.kappa
    z = [dp - 1j * gm for gm in chain.decay_rates]

    if n == 1:
        psi = z[0] * z[1] * zk
        out = (eps * d ** 2 - eps * z[0] * z[1]) / (-g ** 2 * z[1] - d ** 2 * zk + psi)
    elif n == 2:
        inner = d ** 2 * z[2] + z[0] * (d ** 2 - z[1] * z[2])
        as_written = -(-eps * inner / (-g ** 2 * (d ** 2 - z[1] * z[2]) + inner * zk))
        out = -as_written
    elif n == 3:
        s = d ** 2 * z[3] + z[1] * (d ** 2 - z[2] * z[3])
        t = -d ** 2 * (d ** 2 - z[2] * z[3]) + z[0] * s
        psi_a = t * zk
        as_written = -(-eps * t / (-g ** 2 * s + psi_a))
        out = -as_written
    else:
        x = z[0] + (d ** 2 - z[0] * z[1]) * z[2] / d ** 2
        xi = d ** 2 * x / z[4]
        a_num = d ** 2 * eps * z[4] * (-d ** 2 + z[0] * z[1] + x * z[3] - xi)
        gk = g ** 2 - z[0] * zk
        l2 = d ** 2 * zk + z[1] * gk
        l3 = -d ** 2 * gk + z[2] * l2
        # as written: d^2 l3 - z4(-d^2(l2 + z4 l3)); that grouping is not
        # dimensionally consistent.  Closing the bracket after l2 and reading
        # the second z4 as z3 gives the determinant of the chain.
        b_den = d ** 2 * l3 - z[4] * (-d ** 2 * l2 + z[3] * l3)
        as_written = -a_num / b_den
        out = -as_written
    return complex(out) if np.ndim(out) == 0 else out
