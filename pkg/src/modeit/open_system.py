"""Dissipative dynamics on column-stacked density matrices.

Two decay models are supported:

* ``projector``: ``drho/dt = i[rho, H] - 1/2 {gamma |a><a|, rho}``.  This
  loses probability, so ``evolve_master`` rescales ``rho`` to unit trace at
  every cycle boundary and logs the trace it had just before.
* ``lindblad``: spontaneous emission ``|a> -> |b>`` and ``|a> -> |c>`` with
  rates ``gamma_ab`` and ``gamma_ac``; trace preserving.

``vec(rho)`` stacks columns, so ``vec(X rho Y) = kron(Y.T, X) @ vec(rho)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .linalg import check_hermitian, expm_general
from .model import (
    A,
    B,
    C,
    DecayKind,
    DecaySpec,
    ModulationSchedule,
    SystemParams,
    check_density,
    segment_hamiltonians,
)
from .propagate import cycle_substeps, n_complete_cycles

__all__ = [
    "DecaySpec",
    "DensityTrajectory",
    "TraceCollapseError",
    "liouvillian",
    "evolve_master",
    "vec",
    "unvec",
]

_I3 = np.eye(3, dtype=complex)
MIN_TRACE = 1e-12


class TraceCollapseError(RuntimeError):
    """The trace fell below ``MIN_TRACE`` before a renormalization step."""


def vec(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    return np.asarray(v).reshape(3, 3, order="F")


def _left(X):
    return np.kron(_I3, X)


def _right(X):
    return np.kron(X.T, _I3)


def _dissipator(jump: np.ndarray, rate: float) -> np.ndarray:
    jdj = jump.conj().T @ jump
    return rate * (np.kron(jump.conj(), jump) - 0.5 * _left(jdj) - 0.5 * _right(jdj))


def _projector(i: int, j: int) -> np.ndarray:
    P = np.zeros((3, 3), dtype=complex)
    P[i, j] = 1.0
    return P


def liouvillian(H, decay: DecaySpec | None = None) -> np.ndarray:
    """9x9 generator ``L`` with ``d vec(rho)/dt = L @ vec(rho)``."""
    H = check_hermitian(H)
    if H.shape != (3, 3):
        raise ValueError(f"Hamiltonian must be 3x3, got {H.shape}")
    decay = decay or DecaySpec()
    L = 1j * (_right(H) - _left(H))
    if decay.kind is DecayKind.PROJECTOR:
        gamma = decay.gamma * _projector(A, A)
        L = L - 0.5 * (_left(gamma) + _right(gamma))
    elif decay.kind is DecayKind.LINDBLAD:
        L = L + _dissipator(_projector(B, A), decay.gamma_ab)
        L = L + _dissipator(_projector(C, A), decay.gamma_ac)
    return L


@dataclass(frozen=True)
class DensityTrajectory:
    """Sampled density matrices plus the per-cycle trace log.

    ``traces[n]`` is the trace just before the renormalization at the end of
    cycle ``n + 1``; it is empty when no renormalization took place.
    """

    times: np.ndarray
    rhos: np.ndarray
    traces: np.ndarray
    schedule: ModulationSchedule
    params: SystemParams
    samples_per_cycle: int = 1

    def __len__(self) -> int:
        return len(self.times)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def stroboscopic(self) -> "DensityTrajectory":
        k = self.samples_per_cycle
        return DensityTrajectory(self.times[::k], self.rhos[::k], self.traces, self.schedule, self.params, 1)


def _superop_step(L, dt):
    return expm_general(L * dt)


@functools.lru_cache(maxsize=256)
def _cached_superop_substeps(schedule: ModulationSchedule, params: SystemParams, k: int) -> tuple[np.ndarray, ...]:
    h1, h2 = segment_hamiltonians(schedule, params)
    L1 = liouvillian(h1, params.decay)
    L2 = L1 if h2 is h1 else liouvillian(h2, params.decay)
    steps = cycle_substeps(L1, L2, schedule.tau, k, _superop_step)
    for P in steps:
        P.flags.writeable = False
    return tuple(steps)


def evolve_master(
    initial,
    schedule: ModulationSchedule,
    params: SystemParams,
    t_end: float,
    renorm_per_cycle: bool = True,
    samples_per_cycle: int = 1,
) -> DensityTrajectory:
    """Propagate a density matrix through complete cycles up to ``t_end``.

    The decay channel comes from ``params.decay``.  Renormalization only
    applies to projector decay; for the unmodulated schedule the
    "cycle" is ``schedule.tau``.  ``rho`` is re-symmetrized at every cycle
    boundary to keep roundoff from breaking Hermiticity.
    """
    rho = check_density(initial)
    n = n_complete_cycles(t_end, schedule.tau)
    k = int(samples_per_cycle)
    steps = _cached_superop_substeps(schedule, params, k)
    renorm = renorm_per_cycle and params.decay.kind is DecayKind.PROJECTOR

    total = n * k
    rhos = np.empty((total + 1, 3, 3), dtype=complex)
    rhos[0] = rho
    traces = []
    v = vec(rho)
    for i in range(total):
        v = steps[i % k] @ v
        r = unvec(v)
        if (i + 1) % k == 0:
            r = 0.5 * (r + r.conj().T)
            if renorm:
                tr = np.trace(r).real
                if tr < MIN_TRACE:
                    raise TraceCollapseError(
                        f"trace {tr:.3e} below {MIN_TRACE:g} at t = {(i + 1) * schedule.tau / k:g}; "
                        "decay too strong for per-cycle renormalization"
                    )
                traces.append(tr)
                r = r / tr
            v = vec(r)
            rhos[i + 1] = r
        elif renorm:
            rhos[i + 1] = r / np.trace(r).real
        else:
            rhos[i + 1] = r
    times = np.arange(total + 1) * (schedule.tau / k)
    return DensityTrajectory(times, rhos, np.asarray(traces, dtype=float), schedule, params, k)
