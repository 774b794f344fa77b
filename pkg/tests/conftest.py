import numpy as np
import pytest

from modeit.model import SystemParams


@pytest.fixture
def unit_params():
    return SystemParams(1.0, 1.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n=3, scale=1.0):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (X + X.conj().T)


def rk4_switched(H_of_t, psi0, tau, n_cycles, substeps):
    """Classic RK4 on dpsi/dt = -i H(t) psi for a two-segment periodic H.

    Steps never straddle a switching instant: each half-cycle is integrated
    with the Hamiltonian sampled at its midpoint.  Independent of any matrix
    exponential.  Returns the state at every cycle boundary.
    """
    psi = np.array(psi0, dtype=complex)
    out = [psi.copy()]
    h = 0.5 * tau / substeps
    for n in range(n_cycles):
        for half in (0, 1):
            H = np.asarray(H_of_t((n + 0.25 + 0.5 * half) * tau))
            for _ in range(substeps):
                k1 = -1j * H @ psi
                k2 = -1j * H @ (psi + h / 2 * k1)
                k3 = -1j * H @ (psi + h / 2 * k2)
                k4 = -1j * H @ (psi + h * k3)
                psi = psi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(psi.copy())
    return np.array(out)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, format_line
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(format_line(n, *RESULTS[n]))
