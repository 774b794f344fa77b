"""Fast built-in invariant checks, run by ``modeit selftest``.

These mirror the module invariants covered by the test suite but need
nothing beyond numpy, so they work in a bare install.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator

import numpy as np

from . import analytic
from .linalg import commutator, expm_general, expm_hermitian, hermitian_eig
from .model import DecaySpec, Mode, ModulationSchedule, SystemParams, build_hamiltonians, dark_state, hamiltonian_at
from .observables import TimeSeries, absorption_series, fidelity_series, oscillation_stats
from .open_system import evolve_master, liouvillian, unvec, vec
from .propagate import cycle_unitary, evolve_eff, evolve_pure, effective_hamiltonian

UNIT = SystemParams(1.0, 1.0, 0.0)


def _random_hermitian(rng, n=3):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


def _check_eig_reconstruction():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        M = _random_hermitian(rng)
        w, V = hermitian_eig(M)
        worst = max(worst, np.linalg.norm(V @ np.diag(w) @ V.conj().T - M) / np.linalg.norm(M))
        assert np.all(np.diff(w) >= 0)
    return worst <= 1e-11, f"max relative reconstruction error {worst:.2e}"


def _check_expm_group_law():
    rng = np.random.default_rng(2)
    H = _random_hermitian(rng)
    err = np.linalg.norm(expm_hermitian(H, 0.3) @ expm_hermitian(H, 0.9) - expm_hermitian(H, 1.2))
    return err <= 1e-11, f"group-law error {err:.2e}"


def _check_expm_doubling():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        M = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        M /= np.max(np.sum(np.abs(M), axis=0))
        E, H = expm_general(M), expm_general(M / 2)
        worst = max(worst, np.linalg.norm(E - H @ H) / np.linalg.norm(E))
    return worst <= 1e-10, f"doubling-identity error {worst:.2e}"


def _check_commutator_trace():
    rng = np.random.default_rng(4)
    A, B = _random_hermitian(rng), _random_hermitian(rng)
    tr = abs(np.trace(commutator(A, B)))
    return tr <= 1e-12, f"|tr [A,B]| = {tr:.2e}"


def _check_dark_state():
    worst = 0.0
    for oc, op in ((1, 1), (math.sqrt(99), 1), (0.3, 2.0)):
        p = SystemParams(oc, op, 0.0)
        worst = max(worst, np.linalg.norm(build_hamiltonians(p).h_both @ dark_state(p)))
    return worst <= 1e-12, f"max ||H_both psi_dark|| = {worst:.2e}"


def _check_periodicity():
    s = ModulationSchedule(Mode.DOUBLE, 0.7)
    ok = all(
        np.array_equal(hamiltonian_at(s, UNIT, t), hamiltonian_at(s, UNIT, t + s.tau))
        for t in np.linspace(0.01, 2.0, 37)
    )
    return ok, "hamiltonian_at is tau-periodic"


def _check_stroboscopic_consistency():
    s = ModulationSchedule(Mode.SINGLE, 0.3)
    traj = evolve_pure(dark_state(UNIT), s, UNIT, 30.0, samples_per_cycle=4)
    U = cycle_unitary(s, UNIT)
    psi, worst = traj.initial, 0.0
    for state in traj.stroboscopic().states[1:]:
        psi = U @ psi
        worst = max(worst, np.linalg.norm(state - psi))
    norm_dev = np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1))
    return worst <= 1e-11 and norm_dev <= 1e-9, f"max deviation {worst:.2e}, norm drift {norm_dev:.2e}"


def _check_evolve_eff():
    rng = np.random.default_rng(5)
    H = _random_hermitian(rng)
    psi0 = dark_state(UNIT)
    step = expm_hermitian(H, 0.1)
    psi = psi0
    for _ in range(1000):
        psi = step @ psi
    err = np.linalg.norm(evolve_eff(psi0, H, 0.1, 1000) - psi)
    return err <= 1e-10, f"evolve_eff vs repeated product {err:.2e}"


def _check_heff_hermitian():
    hams = build_hamiltonians(UNIT)
    H = effective_hamiltonian(hams.h_c, hams.h_p, 0.4)
    err = np.linalg.norm(H - H.conj().T)
    return err <= 1e-12, f"||H_eff - H_eff^H|| = {err:.2e}"


def _check_analytic_t0():
    worst = 0.0
    for tau in (0.01, 0.1, 0.5, 1.0, 1.6, 1.9):
        worst = max(worst, abs(analytic.fidelity_single(0.0, tau) - 1), abs(analytic.fidelity_double(0.0, tau) - 1))
        for delta in (-0.2, -0.1, 0.0, 0.1, 0.2):
            worst = max(worst, abs(analytic.fidelity_detuned(0.0, tau, delta) - 1))
    return worst <= 1e-12, f"max |F(0) - 1| = {worst:.2e}"


def _check_lindblad_trace():
    rng = np.random.default_rng(6)
    L = liouvillian(_random_hermitian(rng), DecaySpec.lindblad(0.5, 2.0))
    rho = _random_hermitian(rng)
    err = abs(np.trace(unvec(L @ vec(rho))))
    return err <= 1e-12, f"|tr L(rho)| = {err:.2e}"


def _check_master_pure_reduction():
    s = ModulationSchedule(Mode.DOUBLE, 0.2)
    p = SystemParams(1.0, 1.0, -0.1)
    psi0 = dark_state(p)
    pure = evolve_pure(psi0, s, p, 20.0)
    mixed = evolve_master(np.outer(psi0, psi0.conj()), s, p, 20.0)
    outer = np.einsum("ni,nj->nij", pure.states, pure.states.conj())
    err = float(np.max(np.abs(outer - mixed.rhos)))
    return err <= 1e-8, f"max |rho - psi psi^H| = {err:.2e}"


def _check_fig3_single():
    traj = evolve_pure(dark_state(UNIT), ModulationSchedule(Mode.SINGLE, 0.1), UNIT, 3 * 8 * math.pi / math.sqrt(5))
    stats = oscillation_stats(fidelity_series(traj))
    ok = abs(stats.center - 0.82) <= 0.01 and abs(stats.amplitude - 0.18) <= 0.01
    return ok, f"center {stats.center:.4f}, amplitude {stats.amplitude:.4f}"


def _check_series_types():
    s = TimeSeries(np.arange(10.0), np.ones(10))
    traj = evolve_pure(dark_state(UNIT), ModulationSchedule(Mode.DOUBLE, 0.5), UNIT, 5.0)
    ab = absorption_series(traj)
    return len(s) == 10 and len(ab) == len(traj), "time series construction"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "linalg.eig_reconstruction": _check_eig_reconstruction,
    "linalg.expm_group_law": _check_expm_group_law,
    "linalg.expm_doubling": _check_expm_doubling,
    "linalg.commutator_trace": _check_commutator_trace,
    "model.dark_state_annihilation": _check_dark_state,
    "model.periodicity": _check_periodicity,
    "propagate.stroboscopic_consistency": _check_stroboscopic_consistency,
    "propagate.evolve_eff": _check_evolve_eff,
    "propagate.heff_hermitian": _check_heff_hermitian,
    "analytic.t0_identities": _check_analytic_t0,
    "open_system.lindblad_trace": _check_lindblad_trace,
    "open_system.pure_reduction": _check_master_pure_reduction,
    "observables.fig3_single": _check_fig3_single,
    "observables.series": _check_series_types,
}


def run_checks() -> Iterator[tuple[str, bool, str]]:
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
