"""Physical model of the Lambda system: parameters, schedules, Hamiltonians, initial states.

Basis ordering is fixed as ``(|a>, |b>, |c>)`` -> indices ``(0, 1, 2)``;
``|a>`` is the excited state, ``|b>`` the probe ground state and ``|c>`` the
coupling ground state.  Units are natural (hbar = 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "A",
    "B",
    "C",
    "DecayKind",
    "DecaySpec",
    "Mode",
    "ModulationSchedule",
    "SystemParams",
    "Hamiltonians",
    "basis",
    "build_hamiltonians",
    "segment_hamiltonians",
    "hamiltonian_at",
    "dark_state",
    "mixed_initial",
    "check_pure_state",
    "check_density",
    "STANDARD_REF_TAU",
]

A, B, C = 0, 1, 2

# Sampling / renormalization interval used for the unmodulated schedule.
STANDARD_REF_TAU = 0.1


class DecayKind(str, enum.Enum):
    NONE = "none"
    PROJECTOR = "projector"
    LINDBLAD = "lindblad"


@dataclass(frozen=True)
class DecaySpec:
    """Decay channel description.

    ``PROJECTOR`` uses ``gamma`` (loss out of ``|a>``, trace decreasing);
    ``LINDBLAD`` uses ``gamma_ab`` and ``gamma_ac`` (emission ``|a> -> |b>``,
    ``|a> -> |c>``, trace preserving).
    """

    kind: DecayKind = DecayKind.NONE
    gamma: float = 0.0
    gamma_ab: float = 0.0
    gamma_ac: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DecayKind(self.kind))
        for name in ("gamma", "gamma_ab", "gamma_ac"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"decay rate {name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def none(cls) -> "DecaySpec":
        return cls()

    @classmethod
    def projector(cls, gamma: float) -> "DecaySpec":
        return cls(DecayKind.PROJECTOR, gamma=gamma)

    @classmethod
    def lindblad(cls, gamma_ab: float, gamma_ac: float) -> "DecaySpec":
        return cls(DecayKind.LINDBLAD, gamma_ab=gamma_ab, gamma_ac=gamma_ac)

    @classmethod
    def parse(cls, text: str) -> "DecaySpec":
        """Parse ``none``, ``projector:G`` or ``lindblad:Gab,Gac``."""
        text = text.strip().lower()
        if text in ("", "none"):
            return cls.none()
        kind, _, args = text.partition(":")
        try:
            values = [float(v) for v in args.split(",") if v.strip()]
        except ValueError as exc:
            raise ValueError(f"invalid decay rates in {text!r}") from exc
        if kind == "projector" and len(values) == 1:
            return cls.projector(values[0])
        if kind == "lindblad" and len(values) == 2:
            return cls.lindblad(*values)
        raise ValueError(f"invalid decay spec {text!r}; expected none, projector:G or lindblad:Gab,Gac")

    def format(self) -> str:
        if self.kind is DecayKind.PROJECTOR:
            return f"projector:{self.gamma!r}"
        if self.kind is DecayKind.LINDBLAD:
            return f"lindblad:{self.gamma_ab!r},{self.gamma_ac!r}"
        return "none"


class Mode(str, enum.Enum):
    STANDARD = "standard"
    SINGLE = "single"
    DOUBLE = "double"


@dataclass(frozen=True)
class ModulationSchedule:
    """Which fields are switched, and the cycle period.

    For ``STANDARD`` the period has no physical meaning; it is used as the
    sampling and renormalization interval.
    """

    mode: Mode = Mode.STANDARD
    tau: float = STANDARD_REF_TAU

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        tau = float(self.tau)
        if not math.isfinite(tau) or tau <= 0:
            raise ValueError(f"cycle period tau must be > 0, got {tau}")
        object.__setattr__(self, "tau", tau)

    @property
    def modulated(self) -> bool:
        return self.mode is not Mode.STANDARD


@dataclass(frozen=True)
class SystemParams:
    omega_c: float = 1.0
    omega_p: float = 1.0
    delta: float = 0.0
    decay: DecaySpec = field(default_factory=DecaySpec)

    def __post_init__(self):
        for name in ("omega_c", "omega_p", "delta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega_c < 0 or self.omega_p < 0:
            raise ValueError("Rabi frequencies must be >= 0")
        if self.omega_c == 0 and self.omega_p == 0:
            raise ValueError("at least one Rabi frequency must be positive")


class Hamiltonians(NamedTuple):
    h0: np.ndarray
    h_c: np.ndarray
    h_p: np.ndarray
    h_both: np.ndarray


def basis(k: int) -> np.ndarray:
    v = np.zeros(3, dtype=complex)
    v[k] = 1.0
    return v


def build_hamiltonians(params: SystemParams) -> Hamiltonians:
    """Bare detuning term plus the coupling-only, probe-only and both-on Hamiltonians."""
    d = params.delta
    h0 = np.diag([d / 2, -d / 2, d / 2]).astype(complex)

    coupling = np.zeros((3, 3), dtype=complex)
    coupling[A, C] = coupling[C, A] = -params.omega_c / 2
    probe = np.zeros((3, 3), dtype=complex)
    probe[A, B] = probe[B, A] = -params.omega_p / 2

    return Hamiltonians(h0, h0 + coupling, h0 + probe, h0 + coupling + probe)


def segment_hamiltonians(schedule: ModulationSchedule, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonians for the first and second half of a cycle."""
    hams = build_hamiltonians(params)
    if schedule.mode is Mode.SINGLE:
        return hams.h_c, hams.h_both
    if schedule.mode is Mode.DOUBLE:
        return hams.h_c, hams.h_p
    return hams.h_both, hams.h_both


def hamiltonian_at(schedule: ModulationSchedule, params: SystemParams, t: float) -> np.ndarray:
    """Instantaneous Hamiltonian; the first half-cycle is ``[n tau, (n + 1/2) tau)``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    h1, h2 = segment_hamiltonians(schedule, params)
    if not schedule.modulated:
        return h1
    phase = math.fmod(t, schedule.tau) / schedule.tau
    return h1 if phase < 0.5 else h2


def dark_state(params: SystemParams) -> np.ndarray:
    norm = math.hypot(params.omega_c, params.omega_p)
    if norm == 0:
        raise ValueError("dark state undefined when both Rabi frequencies vanish")
    return np.array([0.0, params.omega_c, -params.omega_p], dtype=complex) / norm


def mixed_initial(rho_bb: float, rho_cc: float) -> np.ndarray:
    """Incoherent ground-state mixture ``diag(0, rho_bb, rho_cc)``."""
    for name, p in (("rho_bb", rho_bb), ("rho_cc", rho_cc)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    if abs(rho_bb + rho_cc - 1.0) > 1e-12:
        raise ValueError(f"populations must sum to 1, got {rho_bb + rho_cc}")
    return np.diag([0.0, rho_bb, rho_cc]).astype(complex)


def check_pure_state(psi, atol: float = 1e-10) -> np.ndarray:
    v = np.asarray(psi, dtype=complex)
    if v.shape != (3,):
        raise ValueError(f"state must have 3 amplitudes, got shape {v.shape}")
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state is not normalized: <psi|psi> = {norm!r}")
    return v


def check_density(rho, atol: float = 1e-8) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a 3x3 density matrix."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got shape {r.shape}")
    if np.max(np.abs(r - r.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(r).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lowest = np.linalg.eigvalsh(r)[0]
    if lowest < -1e-9:
        raise ValueError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return r
