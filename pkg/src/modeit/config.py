"""Run configuration shared by the command-line front end.

A config file is INI-style, one section per model type::

    [ModulationSchedule]
    mode = double          ; standard | single | double
    tau = 0.1              ; cycle period (sampling interval for standard)

    [SystemParams]
    omega_c = 1.0
    omega_p = 1.0
    delta = 0.0

    [DecaySpec]
    decay = none           ; none | projector:G | lindblad:Gab,Gac

    [RunConfig]
    init = dark            ; dark | mixed:p_bb,p_cc | state:c_a,c_b,c_c
    t_end = 60
    samples_per_cycle = 1
    format = csv           ; csv | json
    out =                  ; empty -> $MODEIT_OUT or stdout
    jobs = 4

Command-line flags override values read from the file.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .model import DecaySpec, Mode, ModulationSchedule, SystemParams, dark_state, mixed_initial

__all__ = ["RunConfig", "SECTIONS", "parse_init"]

SECTIONS = {
    "ModulationSchedule": ("mode", "tau"),
    "SystemParams": ("omega_c", "omega_p", "delta"),
    "DecaySpec": ("decay",),
    "RunConfig": ("init", "t_end", "samples_per_cycle", "format", "out", "jobs"),
}
_FLOATS = {"tau", "omega_c", "omega_p", "delta", "t_end"}
_INTS = {"samples_per_cycle", "jobs"}


def parse_init(text: str, params: SystemParams) -> np.ndarray:
    """Initial state from ``dark``, ``mixed:p_bb,p_cc`` or ``state:c_a,c_b,c_c``.

    Returns a 3-vector for pure states and a 3x3 matrix for mixtures.
    """
    kind, _, args = text.strip().partition(":")
    kind = kind.lower()
    if kind == "dark" and not args:
        return dark_state(params)
    try:
        values = [complex(v.strip().replace(" ", "")) for v in args.split(",")] if args else []
    except ValueError as exc:
        raise ValueError(f"invalid numbers in init {text!r}") from exc
    if kind == "mixed" and len(values) == 2 and all(v.imag == 0 for v in values):
        return mixed_initial(values[0].real, values[1].real)
    if kind == "state" and len(values) == 3:
        psi = np.array(values, dtype=complex)
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"explicit state must be normalized, |psi| = {norm:.6g}")
        return psi / norm
    raise ValueError(f"invalid init {text!r}; expected dark, mixed:p_bb,p_cc or state:c_a,c_b,c_c")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "double"
    tau: float = 0.1
    omega_c: float = 1.0
    omega_p: float = 1.0
    delta: float = 0.0
    decay: str = "none"
    init: str = "dark"
    t_end: float = 60.0
    samples_per_cycle: int = 1
    format: str = "csv"
    out: str = ""
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _FLOATS:
                object.__setattr__(self, f.name, float(value))
            elif f.name in _INTS:
                object.__setattr__(self, f.name, int(value))
            else:
                object.__setattr__(self, f.name, str(value))
        object.__setattr__(self, "mode", Mode(self.mode.lower()).value)
        object.__setattr__(self, "decay", DecaySpec.parse(self.decay).format())
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.t_end <= 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if self.samples_per_cycle < 1:
            raise ValueError("samples_per_cycle must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        # Fail early on anything the model types would reject later.
        self.schedule()
        self.initial_state()

    # -- model objects --------------------------------------------------

    def params(self) -> SystemParams:
        return SystemParams(self.omega_c, self.omega_p, self.delta, DecaySpec.parse(self.decay))

    def schedule(self) -> ModulationSchedule:
        return ModulationSchedule(Mode(self.mode), self.tau)

    def initial_state(self) -> np.ndarray:
        return parse_init(self.init, self.params())

    def output_path(self, default_name: str):
        """Resolve ``out``: explicit path, else ``$MODEIT_OUT/default_name``, else None (stdout)."""
        if self.out:
            p = Path(self.out)
            return p / default_name if p.is_dir() else p
        env = os.environ.get("MODEIT_OUT")
        return Path(env) / default_name if env else None

    # -- serialization --------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        for section, keys in SECTIONS.items():
            cp[section] = {k: repr(getattr(self, k)) if k in _FLOATS else str(getattr(self, k)) for k in keys}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def read_ini(cls, text: str) -> dict:
        """Keys present in an INI document (unknown sections or keys are errors)."""
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        cp.read_string(text)
        values = {}
        for section in cp.sections():
            if section not in SECTIONS:
                raise ValueError(f"unknown config section [{section}]")
            for key, raw in cp[section].items():
                if key not in SECTIONS[section]:
                    raise ValueError(f"unknown key {key!r} in section [{section}]")
                values[key] = raw.strip()
        return values

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        return cls(**cls.read_ini(text))

    def merged(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})
