import math

from hypothesis import strategies as st

from ddit.model import CavityParams, ChainParams

rates = st.floats(min_value=1e-3, max_value=2.0)
couplings = st.floats(min_value=0.05, max_value=3.0)
detunings = st.floats(min_value=-4.0, max_value=4.0)


@st.composite
def chains(draw, n=st.integers(0, 6), uniform=False):
    n_extra = draw(n)
    if uniform:
        d = draw(couplings)
        d_tail = (d,) * max(n_extra - 1, 0)
    else:
        d_tail = tuple(draw(couplings) for _ in range(max(n_extra - 1, 0)))
    return ChainParams(
        n_extra=n_extra,
        d0=draw(couplings),
        d_tail=d_tail,
        gamma0=draw(st.floats(min_value=0.1, max_value=2.0)),
        gamma_tail=tuple(draw(rates) for _ in range(n_extra)),
        omega_p=draw(st.floats(min_value=1e-3, max_value=0.1)),
    )


@st.composite
def cavities(draw, n=st.integers(0, 5), uniform=False):
    chain = draw(chains(n=n, uniform=uniform))
    if uniform and chain.n_extra >= 2:
        chain = chain.replace(d0=chain.d_tail[0])
    return CavityParams(chain=chain, g=draw(couplings), kappa=draw(st.floats(0.1, 2.0)),
                        epsilon=draw(st.floats(1e-3, 0.1)))


SQRT2 = math.sqrt(2)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
