"""Closed-form fidelity and absorption predictions for the modulated Lambda system.

The single- and double-modulation fidelities assume ``omega_c = omega_p = 1``
and zero detuning.  The detuned expressions are a small-``tau``,
small-``delta`` expansion (kept to ``O(tau^2)`` and ``O(delta^3)``) for the
double-modulation schedule with the same Rabi frequencies.  All expressions
are evaluated as written, without resummation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields

import numpy as np

__all__ = [
    "CoeffSet",
    "COEFF_COLUMNS",
    "VALID_DELTA",
    "VALID_TAU",
    "AGREEMENT_DELTA",
    "fidelity_single",
    "fidelity_single_limit",
    "fidelity_double",
    "detuned_coeffs",
    "fidelity_detuned",
    "absorption_detuned",
    "absorption_envelope",
    "coeffs_to_csv",
    "fidelity_extrema",
]

SQRT2 = math.sqrt(2.0)
VALID_DELTA = 0.3
VALID_TAU = 1.0
AGREEMENT_DELTA = 0.2  # beyond this the expansion visibly departs from exact propagation


def _sgn(x: float) -> float:
    # sgn(0) = 0 keeps the paired coefficients equal at zero detuning.
    return float(np.sign(x))


def fidelity_single(t, tau: float):
    """Stroboscopic fidelity for single modulation (probe switched only)."""
    if tau * tau >= 576:
        raise ValueError(f"tau = {tau} outside the single-modulation formula regime (tau^2 < 576)")
    t = np.asarray(t, dtype=float)
    A = 184320 - 192 * tau**2 + tau**4
    amp = (576 - tau**2) ** 2 + (36864 + 768 * tau**2 + tau**4) * np.cos(math.sqrt(A) * t / 768)
    return np.abs(amp) ** 2 / (4 * A**2)


def fidelity_single_limit(t):
    """``tau -> 0`` limit of the single-modulation fidelity."""
    t = np.asarray(t, dtype=float)
    return (0.9 + 0.1 * np.cos(math.sqrt(5) / 4 * t)) ** 2


def fidelity_double(t, tau: float):
    """Stroboscopic fidelity for complementary (double) modulation."""
    if tau * tau >= 192:
        raise ValueError(f"tau = {tau} outside the double-modulation formula regime (tau^2 < 192)")
    t = np.asarray(t, dtype=float)
    Bq = 18432 - 48 * tau**2 + tau**4 / 2
    amp = (192 - tau**2) ** 2 + 288 * tau**2 * np.cos(math.sqrt(Bq) * t / 384)
    return np.abs(amp) ** 2 / (4 * Bq**2)


@dataclass(frozen=True)
class CoeffSet:
    """Coefficients of the detuned fidelity and absorption expansions."""

    tau: float
    delta: float
    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    b6: float
    b7: float
    f1: float
    f2: float
    f3: float
    extrapolated: bool = False

    @property
    def a(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    @property
    def b(self) -> tuple[float, ...]:
        return (self.b1, self.b2, self.b3, self.b4, self.b5, self.b6, self.b7)

    @property
    def f(self) -> tuple[float, float, float]:
        return (self.f1, self.f2, self.f3)

    def row(self) -> tuple[float, ...]:
        return astuple(self)[:-1]


COEFF_COLUMNS = tuple(f.name for f in fields(CoeffSet))[:-1]


def detuned_coeffs(tau: float, delta: float) -> CoeffSet:
    """All fourteen expansion coefficients at ``(tau, delta)``.

    Outside ``|delta| <= 0.3``, ``tau <= 1`` the result is still returned but
    marked ``extrapolated``.
    """
    t2 = tau * tau
    d = delta
    d2, d3 = d * d, d * d * d
    sg = _sgn(d)

    a_odd = sg * (3 * SQRT2 * d3 - SQRT2 * d * t2 / 3072 * (12 + 197 * d2))
    a_even = 2 * d2 + t2 / 128 * (1 - 8 * d2)
    a1 = a_even - a_odd
    a2 = a_even + a_odd
    a3 = d2 * t2 / 64
    a4 = 1 - 4 * d2 - t2 / 64 * (1 - 7 * d2)

    f_even = SQRT2 / 4 + 5 * SQRT2 * d2 / 16 - SQRT2 * t2 / 12288 * (4 + 7 * d2)
    f_odd = sg * (d / 4 - 3 * d3 / 2 - d * t2 / 512 * (1 - 4 * d2))
    f1 = f_even + f_odd
    f2 = f_even - f_odd
    f3 = SQRT2 / 2 + 5 * SQRT2 * d2 / 8 - SQRT2 * t2 / 6144 * (4 + 7 * d2)

    b_even = -tau / 32 * (1 - 12 * d2)
    b_odd = sg * SQRT2 * d * tau / 256 * (4 + 35 * d2)
    b1 = b_even - b_odd
    b2 = b_even + b_odd
    b3 = -3 * d2 * tau / 16
    b45_even = d / 2 * (1 - 2 * d2) - d3 * t2 / 384
    b45_odd = sg * (3 * SQRT2 * d2 / 4 + SQRT2 * t2 / 6144 * (12 - 109 * d2))
    b4 = b45_even - b45_odd
    b5 = b45_even + b45_odd
    b6 = SQRT2 * d2 / 2 + SQRT2 * t2 / 2048 * (4 - 33 * d2)
    b7 = tau / 16 * (1 - 9 * d2)

    extrapolated = abs(d) > VALID_DELTA or tau > VALID_TAU
    return CoeffSet(tau, delta, a1, a2, a3, a4, b1, b2, b3, b4, b5, b6, b7, f1, f2, f3, extrapolated)


def fidelity_detuned(t, tau: float, delta: float):
    c = detuned_coeffs(tau, delta)
    t = np.asarray(t, dtype=float)
    return c.a1 * np.cos(c.f1 * t) + c.a2 * np.cos(c.f2 * t) + c.a3 * np.cos(c.f3 * t) + c.a4


def absorption_detuned(t, tau: float, delta: float):
    """Predicted ``Im(rho_ab)`` at stroboscopic times (note the minus signs on b5, b6)."""
    c = detuned_coeffs(tau, delta)
    t = np.asarray(t, dtype=float)
    return (
        c.b1 * np.cos(c.f1 * t)
        + c.b2 * np.cos(c.f2 * t)
        + c.b3 * np.cos(c.f3 * t)
        + c.b4 * np.sin(c.f1 * t)
        - c.b5 * np.sin(c.f2 * t)
        - c.b6 * np.sin(c.f3 * t)
        + c.b7
    )


def absorption_envelope(tau: float, delta: float) -> float:
    """Dominant absorption level ``b7 + sqrt(b1^2 + b4^2)``."""
    c = detuned_coeffs(tau, delta)
    return c.b7 + math.hypot(c.b1, c.b4)


def coeffs_to_csv(coeff_sets) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COEFF_COLUMNS)
    for c in coeff_sets:
        writer.writerow([format(v, ".12g") for v in c.row()])
    return buf.getvalue()


def fidelity_extrema(mode: str, tau: float) -> tuple[float, float]:
    """``(amplitude, center)`` of the zero-detuning fidelity oscillation.

    The maximum is 1 (cosine at +1, reached at t = 0); the minimum is the
    cosine-at--1 value of the single- or double-modulation formula.
    """
    if mode == "single":
        lo = float(fidelity_single(math.pi * 768 / math.sqrt(184320 - 192 * tau**2 + tau**4), tau))
    elif mode == "double":
        lo = float(fidelity_double(math.pi * 384 / math.sqrt(18432 - 48 * tau**2 + tau**4 / 2), tau))
    else:
        raise ValueError(f"mode must be 'single' or 'double', got {mode!r}")
    return 0.5 * (1.0 - lo), 0.5 * (1.0 + lo)
