import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from modeit.model import (
    STANDARD_REF_TAU,
    DecaySpec,
    Mode,
    ModulationSchedule,
    SystemParams,
    basis,
    build_hamiltonians,
    dark_state,
    mixed_initial,
)
from modeit.observables import absorption_series, plateau_value
from modeit.open_system import TraceCollapseError, evolve_master, liouvillian, unvec, vec
from modeit.propagate import evolve_pure

PA = np.outer(basis(0), basis(0))


def direct_rhs(H, rho, decay):
    """dρ/dt written out with matrix products, no vectorization."""
    out = -1j * (H @ rho - rho @ H)
    if decay.kind.value == "projector":
        G = decay.gamma * PA
        out -= 0.5 * (G @ rho + rho @ G)
    elif decay.kind.value == "lindblad":
        for rate, k in ((decay.gamma_ab, 1), (decay.gamma_ac, 2)):
            J = np.outer(basis(k), basis(0))
            out += rate * (J @ rho @ J.conj().T - 0.5 * (J.conj().T @ J @ rho + rho @ J.conj().T @ J))
    return out


def steady_absorption(params, dominant):
    """Im rho_ab of the long-time state of the unmodulated generator."""
    L = liouvillian(build_hamiltonians(params).h_both, params.decay)
    w, V = np.linalg.eig(L)
    i = int(np.argmax(w.real)) if dominant else int(np.argmin(np.abs(w)))
    rho = unvec(V[:, i])
    rho /= np.trace(rho)
    return rho[0, 1].imag


def dark_rho(params):
    psi = dark_state(params)
    return np.outer(psi, psi.conj())


class TestLiouvillian:
    def test_zero(self):
        np.testing.assert_array_equal(liouvillian(np.zeros((3, 3)), DecaySpec()), np.zeros((9, 9)))

    def test_projector_pure_loss(self):
        L = liouvillian(np.zeros((3, 3)), DecaySpec.projector(1.0))
        np.testing.assert_allclose(unvec(L @ vec(PA)), -PA)

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(0, 2**32 - 1),
        st.sampled_from([DecaySpec(), DecaySpec.projector(2.0), DecaySpec.lindblad(0.5, 1.5)]),
    )
    def test_matches_direct_rhs(self, seed, decay):
        rng = np.random.default_rng(seed)
        H, X = random_hermitian(rng), random_hermitian(rng) + 0.3j * random_hermitian(rng)
        np.testing.assert_allclose(unvec(liouvillian(H, decay) @ vec(X)), direct_rhs(H, X, decay), atol=1e-12)

    def test_lindblad_trace_preserving(self, rng):
        L = liouvillian(random_hermitian(rng), DecaySpec.lindblad(0.5, 2.5))
        for _ in range(10):
            rho = random_hermitian(rng)
            assert abs(np.trace(unvec(L @ vec(rho)))) <= 1e-12

    def test_vec_roundtrip(self, rng):
        X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        np.testing.assert_array_equal(unvec(vec(X)), X)
        assert vec(X)[1] == X[1, 0]  # column stacking

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            liouvillian(np.eye(2))


class TestEvolveMaster:
    def test_zero_decay_reduces_to_pure(self):
        p = SystemParams(1.0, 1.0, -0.1)
        for mode in (Mode.SINGLE, Mode.DOUBLE):
            s = ModulationSchedule(mode, 0.5)
            psi0 = dark_state(p)
            pure = evolve_pure(psi0, s, p, 100.0)
            mixed = evolve_master(np.outer(psi0, psi0.conj()), s, p, 100.0)
            outer = np.einsum("ni,nj->nij", pure.states, pure.states.conj())
            assert np.max(np.abs(outer - mixed.rhos)) <= 1e-8

    def test_matches_scipy_superoperator(self):
        p = SystemParams(1.0, 1.0, 0.2, DecaySpec.lindblad(0.7, 0.3))
        s = ModulationSchedule(Mode.DOUBLE, 0.6)
        rho0 = mixed_initial(0.7, 0.3)
        traj = evolve_master(rho0, s, p, 6.0)
        hams = build_hamiltonians(p)
        P = scipy.linalg.expm(0.3 * liouvillian(hams.h_p, p.decay)) @ scipy.linalg.expm(0.3 * liouvillian(hams.h_c, p.decay))
        v = vec(rho0)
        for rho in traj.rhos[1:]:
            v = P @ v
            np.testing.assert_allclose(rho, unvec(v), atol=1e-10)

    def test_lindblad_conservation(self):
        p = SystemParams(math.sqrt(99), 1.0, 1.0, DecaySpec.lindblad(2.5, 2.5))
        traj = evolve_master(mixed_initial(0.99, 0.01), ModulationSchedule(Mode.DOUBLE, 0.2), p, 10.0, samples_per_cycle=10)
        assert np.max(np.abs(np.trace(traj.rhos, axis1=1, axis2=2) - 1)) <= 1e-8
        assert min(np.linalg.eigvalsh(r).min() for r in traj.rhos) >= -1e-8
        assert traj.traces.size == 0

    def test_projector_renormalization_log(self):
        p = SystemParams(1.0, 1.0, -0.1, DecaySpec.projector(1.0))
        traj = evolve_master(dark_rho(p), ModulationSchedule(Mode.DOUBLE, 0.5), p, 50.0, samples_per_cycle=4)
        assert traj.traces.size == 100
        assert np.all((traj.traces > 0) & (traj.traces <= 1))
        np.testing.assert_allclose(np.trace(traj.rhos, axis1=1, axis2=2).real, 1.0, atol=1e-12)
        assert min(np.linalg.eigvalsh(r).min() for r in traj.rhos) >= -1e-8

    def test_projector_without_renormalization_decays(self):
        p = SystemParams(1.0, 1.0, -0.1, DecaySpec.projector(1.0))
        traj = evolve_master(dark_rho(p), ModulationSchedule(Mode.DOUBLE, 0.5), p, 50.0, renorm_per_cycle=False)
        tr = np.trace(traj.rhos, axis1=1, axis2=2).real
        assert np.all(np.diff(tr) <= 1e-15) and tr[-1] < 1

    def test_trace_collapse(self):
        p = SystemParams(1e-6, 0.0, 0.0, DecaySpec.projector(100.0))
        with pytest.raises(TraceCollapseError, match="renormalization"):
            evolve_master(PA.astype(complex), ModulationSchedule(Mode.SINGLE, 1.0), p, 5.0)

    @pytest.mark.parametrize("decay, dominant", [(DecaySpec.projector(1.0), True), (DecaySpec.lindblad(0.5, 0.5), False)])
    def test_standard_plateau_matches_steady_state(self, decay, dominant):
        p = SystemParams(1.0, 1.0, -0.1, decay)
        traj = evolve_master(dark_rho(p), ModulationSchedule(Mode.STANDARD, STANDARD_REF_TAU), p, 80.0)
        plateau = plateau_value(absorption_series(traj), 80.0)
        assert plateau.value == pytest.approx(steady_absorption(p, dominant), rel=0.05)

    def test_fast_modulation_approaches_halved_fields(self):
        # tau -> 0 averages each field over half the cycle: standard EIT at half the Rabi frequencies.
        p = SystemParams(1.0, 1.0, -0.1, DecaySpec.projector(1.0))
        half = SystemParams(0.5, 0.5, -0.1, DecaySpec.projector(1.0))
        mod = evolve_master(dark_rho(p), ModulationSchedule(Mode.DOUBLE, 0.01), p, 80.0)
        std = evolve_master(dark_rho(half), ModulationSchedule(Mode.STANDARD, STANDARD_REF_TAU), half, 80.0)
        a = plateau_value(absorption_series(mod), 80.0).value
        b = plateau_value(absorption_series(std), 80.0).value
        assert a == pytest.approx(b, rel=0.05)

    def test_plateau_flat_and_positive(self):
        p = SystemParams(1.0, 1.0, -0.1, DecaySpec.projector(1.0))
        traj = evolve_master(dark_rho(p), ModulationSchedule(Mode.DOUBLE, 0.1), p, 100.0)
        plateau = plateau_value(absorption_series(traj), 80.0)
        assert plateau.value > 0 and plateau.flatness < 0.05 * plateau.value

    def test_rejects_invalid_density(self):
        p = SystemParams(1.0, 1.0, 0.0, DecaySpec.projector(1.0))
        with pytest.raises(ValueError):
            evolve_master(np.diag([0.5, 0.6, 0.1]), ModulationSchedule(Mode.SINGLE, 0.1), p, 1.0)
