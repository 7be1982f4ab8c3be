import numpy as np
import pytest

from ddit import lindblad as L
from ddit.model import CavityParams, ChainParams
from ddit.semiclassical import solve_cavity, solve_free_space


def chain(n=1, omega=0.03, gamma=1e-3, d0=0.5, d=0.35):
    return ChainParams.uniform(n, d0, d, 1.0, gamma, omega)


def cavity(n=1, eps=0.03, g=5.0, d=3.0, n_max=2):
    return CavityParams(ChainParams.uniform(n, d, d, 1.0, 1e-3, 1.0), g=g, kappa=1.0,
                        epsilon=eps, n_max=n_max)


def random_hermitian(dim, rng):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m + m.conj().T


def test_dimensions():
    liou = L.build_liouvillian_free(chain(1), 0.0)
    assert liou.dim == 4 and liou.matrix.shape == (16, 16)
    cav = L.build_liouvillian_cavity(cavity(1, n_max=2), 0.0)
    assert cav.dim == 12


@pytest.mark.parametrize("builder", ["free", "cavity"])
def test_trace_preservation(builder):
    rng = np.random.default_rng(0)
    liou = (L.build_liouvillian_free(chain(2), 0.3) if builder == "free"
            else L.build_liouvillian_cavity(cavity(1), 0.3))
    for _ in range(3):
        rho = random_hermitian(liou.dim, rng)
        drho = liou.apply(rho)
        assert abs(np.trace(drho)) < 1e-10
        assert np.allclose(drho, drho.conj().T, atol=1e-12)


def test_vectorization_convention():
    # apply() must agree with the commutator written out directly
    p = chain(1)
    liou = L.build_liouvillian_free(p, 0.2)
    lay = liou.layout
    sm = [lay.sigma_minus(i) for i in range(2)]
    h = sum(0.1 * lay.sigma_z(i) for i in range(2))
    hop = 0.5 * sm[0] @ sm[1].conj().T
    h = h + hop + hop.conj().T + 0.03 * (sm[0] + sm[0].conj().T)
    rho = random_hermitian(4, np.random.default_rng(1))
    expected = -1j * (h @ rho - rho @ h)
    for c, g in zip(sm, (1.0, 1e-3)):
        cd = c.conj().T
        expected += g * (2 * c @ rho @ cd - cd @ c @ rho - rho @ cd @ c)
    assert np.allclose(liou.apply(rho), expected, atol=1e-14)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_undriven_ground_state(n):
    rho = L.steady_state(L.build_liouvillian_free(chain(n, omega=0.0), 0.4))
    ground = np.zeros((rho.dim, rho.dim))
    ground[0, 0] = 1
    assert np.allclose(rho.entries, ground, atol=1e-12)
    assert L.expectation(rho, "sigma_plus_0") == 0


def test_undriven_empty_cavity_vacuum():
    rho = L.steady_state(L.build_liouvillian_cavity(cavity(1, eps=0.0, g=0.0), 0.1))
    assert abs(rho.entries[0, 0] - 1) < 1e-12
    assert L.expectation(rho, "a") == 0


def test_optical_bloch_single_tls():
    # steady state of a single driven TLS: Im<s+> = Omega*gamma/(gamma^2 + 2 Omega^2)
    om = 0.01
    value = L.oracle_response(chain(0, omega=om), 0.0)
    assert value.imag == pytest.approx(om / (1 + 2 * om ** 2), rel=1e-12)
    assert abs(value.imag - 0.01) / 0.01 < 5e-4


def test_fig2a_weak_drive_within_one_percent():
    p = chain(1)
    x = np.linspace(-3, 3, 61)
    oracle = L.oracle_response(p, x).imag / 0.03
    semi = solve_free_space(p, x).imag / 0.03
    assert np.max(np.abs(oracle - semi)) < 1e-2


def test_drive_quadratic_convergence():
    x = np.linspace(-2, 2, 21)

    def deviation(om):
        p = chain(1, omega=om)
        return np.max(np.abs(L.oracle_response(p, x) - solve_free_space(p, x))) / om

    assert deviation(2e-3) / deviation(1e-3) >= 3


def test_oracle_vs_closed_forms_n2():
    p = chain(2, omega=1e-3)
    x = np.linspace(-2, 2, 41)
    dev = np.abs(L.oracle_response(p, x).imag - solve_free_space(p, x).imag) / 1e-3
    assert dev.max() < 1e-2


def test_fock_truncation_convergence():
    for dp in (0.0, 1.0, 5.8):
        a1 = L.oracle_response(cavity(1, n_max=1), dp)
        a2 = L.oracle_response(cavity(1, n_max=2), dp)
        assert abs(a1 - a2) / abs(a2) < 1e-3


def test_cavity_weak_drive_matches_semiclassical():
    p = cavity(1, eps=1e-3)
    x = np.linspace(-8, 8, 33)
    dev = np.abs(L.oracle_response(p, x) - solve_cavity(p, x)) / 1e-3
    assert dev.max() < 1e-2


def test_reversed_tail_is_equivalent():
    # a palindromic tail is unchanged by reversal; the oracle must agree with itself
    p = ChainParams(3, 0.5, (0.3, 0.3), 1.0, (2e-3, 1e-2, 2e-3), 1e-3)
    q = p.replace(gamma_tail=tuple(reversed(p.gamma_tail)))
    assert L.oracle_response(p, 0.2) == pytest.approx(L.oracle_response(q, 0.2), rel=1e-12)


def test_caps():
    with pytest.raises(L.OracleCapError):
        L.build_liouvillian_free(chain(7), 0.0)
    with pytest.raises(L.OracleCapError):
        L.build_liouvillian_free(chain(3), 0.0, max_n=2)
    with pytest.raises(L.OracleCapError):
        L.build_liouvillian_cavity(cavity(4), 0.0)


def test_density_matrix_checks():
    good = L.DensityMatrix(2, np.diag([0.7, 0.3]).astype(complex))
    assert good.check() is good
    with pytest.raises(L.SteadyStateError):
        L.DensityMatrix(2, np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex)).check()
    with pytest.raises(L.SteadyStateError):
        L.DensityMatrix(2, np.diag([0.7, 0.7]).astype(complex)).check()
    with pytest.raises(L.SteadyStateError):
        L.DensityMatrix(2, np.diag([1.2, -0.2]).astype(complex)).check()


def test_non_unique_steady_state_reported():
    # a lossless TLS that is decoupled from everything keeps its initial state
    p = ChainParams(1, 0.0, (), 1.0, (0.0,), 0.03)
    with pytest.raises(L.SteadyStateError):
        L.steady_state(L.build_liouvillian_free(p, 0.1))


def test_expectation_hand_computed():
    lay = L.HilbertLayout(1)
    rho = L.DensityMatrix(2, np.array([[0.6, 0.2 + 0.1j], [0.2 - 0.1j, 0.4]]), lay)
    # sigma_+ = |e><g|, Tr(rho |e><g|) = rho[g, e]
    assert L.expectation(rho, "sigma_plus_0") == 0.2 + 0.1j
    assert L.expectation(rho, np.eye(2)) == 1.0
    with pytest.raises(ValueError):
        L.expectation(rho, np.eye(3))
    with pytest.raises(ValueError):
        L.expectation(rho, "a")


@pytest.mark.parametrize("p", [chain(2), cavity(1)])
def test_steady_states_are_physical(p):
    for dp in np.linspace(-3, 3, 7):
        liou = (L.build_liouvillian_cavity(p, dp) if isinstance(p, CavityParams)
                else L.build_liouvillian_free(p, dp))
        rho = L.steady_state(liou)
        assert np.linalg.norm(liou.matrix @ rho.entries.reshape(-1, order="F")) <= \
            1e-10 * np.linalg.norm(liou.matrix)
        rho.check()
