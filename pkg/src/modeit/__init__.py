"""Simulation of a Lambda-type three-level atom whose probe and control fields are switched on and off each cycle."""

from .analytic import (
    CoeffSet,
    absorption_detuned,
    absorption_envelope,
    detuned_coeffs,
    fidelity_detuned,
    fidelity_double,
    fidelity_single,
    fidelity_single_limit,
)
from .model import (
    DecaySpec,
    Mode,
    ModulationSchedule,
    SystemParams,
    build_hamiltonians,
    dark_state,
    hamiltonian_at,
    mixed_initial,
)
from .observables import (
    TimeSeries,
    absorption_of,
    absorption_series,
    fidelity_series,
    oscillation_stats,
    plateau_value,
    qdi_phase_estimate,
    series_correlation,
)
from .open_system import DensityTrajectory, evolve_master, liouvillian
from .propagate import Trajectory, cycle_unitary, effective_hamiltonian, evolve_eff, evolve_pure, fidelity

__version__ = "0.1.0"
