"""Measured quantities: absorption, fidelity series, oscillation statistics, plateaus."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import A, B, SystemParams

__all__ = [
    "TimeSeries",
    "OscillationStats",
    "Plateau",
    "absorption_of",
    "fidelity_series",
    "absorption_series",
    "oscillation_stats",
    "plateau_value",
    "series_correlation",
    "qdi_phase_estimate",
    "DEFAULT_STATS_WINDOW",
]

# Three periods of the tau -> 0 single-modulation oscillation.
DEFAULT_STATS_WINDOW = (0.0, 3 * 8 * math.pi / math.sqrt(5))
MIN_WINDOW_SAMPLES = 8


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError(f"times and values must be 1-D of equal length, got {t.shape} and {v.shape}")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.times)

    def window(self, start: float, stop: float) -> "TimeSeries":
        mask = (self.times >= start) & (self.times <= stop)
        return TimeSeries(self.times[mask], self.values[mask], self.label)


@dataclass(frozen=True)
class OscillationStats:
    amplitude: float
    center: float
    window: tuple[float, float]


@dataclass(frozen=True)
class Plateau:
    value: float
    flatness: float
    time: float


def absorption_of(rho) -> float:
    """``Im(rho_ab)``, taken as the absorption with unit proportionality constant."""
    return float(np.asarray(rho)[A, B].imag)


def fidelity_series(traj, reference=None, label: str = "F") -> TimeSeries:
    """``|<reference|psi(t)>|^2`` along a pure trajectory (reference defaults to its first state)."""
    ref = traj.states[0] if reference is None else np.asarray(reference, dtype=complex)
    values = np.abs(traj.states @ ref.conj()) ** 2
    return TimeSeries(traj.times, values, label)


def absorption_series(traj, label: str = "Im rho_ab") -> TimeSeries:
    """Absorption along a pure (``states``) or mixed (``rhos``) trajectory."""
    if hasattr(traj, "rhos"):
        values = traj.rhos[:, A, B].imag
    else:
        values = (traj.states[:, A] * traj.states[:, B].conj()).imag
    return TimeSeries(traj.times, values, label)


def oscillation_stats(series: TimeSeries, window: tuple[float, float] = DEFAULT_STATS_WINDOW) -> OscillationStats:
    """Half the peak-to-peak excursion and the midpoint inside ``window``."""
    inside = series.window(*window)
    if len(inside) < MIN_WINDOW_SAMPLES:
        raise ValueError(
            f"only {len(inside)} samples in window {window}; need at least {MIN_WINDOW_SAMPLES}"
        )
    hi, lo = float(inside.values.max()), float(inside.values.min())
    return OscillationStats(0.5 * (hi - lo), 0.5 * (hi + lo), (float(window[0]), float(window[1])))


def plateau_value(series: TimeSeries, t_probe: float) -> Plateau:
    """Value at the sample nearest ``t_probe``.

    ``flatness`` is the standard deviation over ``[0.9 t_probe, t_probe]``;
    a large value means the series has not settled.
    """
    if not series.times[0] <= t_probe <= series.times[-1] + 1e-9:
        raise ValueError(f"t_probe = {t_probe} outside series range [{series.times[0]}, {series.times[-1]}]")
    i = int(np.argmin(np.abs(series.times - t_probe)))
    tail = series.window(0.9 * t_probe, t_probe + 1e-9)
    flatness = float(np.std(tail.values)) if len(tail) else 0.0
    return Plateau(float(series.values[i]), flatness, float(series.times[i]))


def series_correlation(x: TimeSeries, y: TimeSeries) -> float:
    """Pearson correlation of two series sampled on the same grid."""
    if x.times.shape != y.times.shape or not np.allclose(x.times, y.times, rtol=0, atol=1e-12):
        raise ValueError("series must share an identical time grid")
    dx = x.values - x.values.mean()
    dy = y.values - y.values.mean()
    sx, sy = math.sqrt(float(dx @ dx)), math.sqrt(float(dy @ dy))
    if sx == 0 or sy == 0:
        raise ValueError("correlation undefined for a constant series")
    return float(np.clip((dx @ dy) / (sx * sy), -1.0, 1.0))


def qdi_phase_estimate(params: SystemParams, tau: float) -> tuple[complex, complex]:
    """Approximate ``|a>`` amplitude after the first and second half of a double-modulation cycle.

    Treats each half-period as an isolated two-level rotation, starting
    from ``(|b> - |c>)/sqrt(2)``.
    """
    if params.omega_c <= 0 or params.omega_p <= 0:
        raise ValueError("both Rabi frequencies must be positive")
    sc = math.sin(math.pi + tau * params.omega_c / 4)
    amp_half = 1j / math.sqrt(2) * sc
    amp_full = 1j / math.sqrt(2) * (sc * math.cos(tau * params.omega_p / 4) + math.sin(tau * params.omega_p / 4))
    return amp_half, amp_full
