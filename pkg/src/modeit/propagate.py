"""Closed-system evolution under piecewise-constant Hamiltonians.

Each half-cycle Hamiltonian is constant, so propagation is exact up to
eigendecomposition roundoff: one exponential per (sub-)segment, reused for
every cycle.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import check_hermitian, commutator, expm_hermitian, hermitian_eig
from .model import ModulationSchedule, SystemParams, check_pure_state, segment_hamiltonians

__all__ = [
    "Trajectory",
    "cycle_unitary",
    "cycle_substeps",
    "n_complete_cycles",
    "evolve_pure",
    "effective_hamiltonian",
    "evolve_eff",
    "fidelity",
]

# Slack when deciding whether t_end lands on a cycle boundary.
_BOUNDARY_SLACK = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Sampled pure-state trajectory; ``states[i]`` is the state at ``times[i]``."""

    times: np.ndarray
    states: np.ndarray
    schedule: ModulationSchedule
    params: SystemParams
    samples_per_cycle: int = 1

    def __len__(self) -> int:
        return len(self.times)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    def stroboscopic(self) -> "Trajectory":
        k = self.samples_per_cycle
        return Trajectory(self.times[::k], self.states[::k], self.schedule, self.params, 1)


def n_complete_cycles(t_end: float, tau: float) -> int:
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    return int(math.floor(t_end / tau + _BOUNDARY_SLACK))


def cycle_substeps(gen1, gen2, tau: float, samples_per_cycle: int, step: Callable) -> list[np.ndarray]:
    """Propagators between consecutive intra-cycle sample times.

    ``step(G, dt)`` must return the propagator of the constant generator
    ``G`` over ``dt``.  Sample ``j`` sits at ``j * tau / samples_per_cycle``;
    an interval straddling the half-cycle switch is split in two.
    """
    k = int(samples_per_cycle)
    if k < 1:
        raise ValueError(f"samples_per_cycle must be >= 1, got {samples_per_cycle}")
    half = 0.5 * tau
    out = []
    for j in range(k):
        t0, t1 = j * tau / k, (j + 1) * tau / k
        dt1 = max(0.0, min(t1, half) - t0)
        dt2 = max(0.0, t1 - max(t0, half))
        P = None
        if dt1 > 0:
            P = step(gen1, dt1)
        if dt2 > 0:
            P2 = step(gen2, dt2)
            P = P2 if P is None else P2 @ P
        out.append(P)
    return out


@functools.lru_cache(maxsize=256)
def _cached_unitary_substeps(schedule: ModulationSchedule, params: SystemParams, k: int) -> tuple[np.ndarray, ...]:
    h1, h2 = segment_hamiltonians(schedule, params)
    steps = cycle_substeps(h1, h2, schedule.tau, k, expm_hermitian)
    for P in steps:
        P.flags.writeable = False
    return tuple(steps)


def cycle_unitary(schedule: ModulationSchedule, params: SystemParams) -> np.ndarray:
    """One-period propagator ``exp(-i tau H2 / 2) @ exp(-i tau H1 / 2)``."""
    if not schedule.modulated:
        raise ValueError("cycle_unitary requires a modulated schedule (single or double)")
    h1, h2 = segment_hamiltonians(schedule, params)
    half = 0.5 * schedule.tau
    return expm_hermitian(h2, half) @ expm_hermitian(h1, half)


def evolve_pure(
    initial,
    schedule: ModulationSchedule,
    params: SystemParams,
    t_end: float,
    samples_per_cycle: int = 1,
) -> Trajectory:
    """Propagate a pure state exactly through complete cycles up to ``t_end``.

    The run stops at the last cycle boundary not after ``t_end``; with
    ``samples_per_cycle = k`` the state is recorded ``k`` times per cycle.
    """
    psi = check_pure_state(initial)
    n = n_complete_cycles(t_end, schedule.tau)
    k = int(samples_per_cycle)
    steps = _cached_unitary_substeps(schedule, params, k)

    total = n * k
    states = np.empty((total + 1, 3), dtype=complex)
    states[0] = psi
    for i in range(total):
        psi = steps[i % k] @ psi
        states[i + 1] = psi
    times = np.arange(total + 1) * (schedule.tau / k)
    return Trajectory(times, states, schedule, params, k)


def effective_hamiltonian(H1, H2, tau: float) -> np.ndarray:
    """Three-term BCH effective Hamiltonian of the two-segment cycle.

    ``H_eff = (H1 + H2)/2 - (i tau/8) [H2, H1] - (tau^2/96) [H2 - H1, [H2, H1]]``
    """
    H1, H2 = check_hermitian(H1), check_hermitian(H2)
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    c = commutator(H2, H1)
    return 0.5 * (H1 + H2) - (1j * tau / 8) * c - (tau**2 / 96) * commutator(H2 - H1, c)


def evolve_eff(initial, H_eff, tau: float, n) -> np.ndarray:
    """State after ``n`` cycles of ``exp(-i tau H_eff)`` from a single diagonalization.

    ``n`` may be an integer (returns one state) or an array of cycle counts
    (returns one row per count).
    """
    psi = np.asarray(initial, dtype=complex)
    w, V = hermitian_eig(H_eff)
    coeffs = V.conj().T @ psi
    counts = np.asarray(n)
    if np.any(counts < 0):
        raise ValueError("cycle count must be >= 0")
    phases = np.exp(-1j * np.multiply.outer(counts * tau, w))
    return (phases * coeffs) @ V.T


def fidelity(reference, state) -> float:
    """Overlap probability ``|<reference|state>|^2``."""
    ref = check_pure_state(reference, atol=1e-9)
    psi = check_pure_state(state, atol=1e-9)
    return float(min(1.0, abs(np.vdot(ref, psi)) ** 2))
