"""
Run configuration in a flat dotted-key text format.

```
# forbidden angles of propanediol along a field grid
molecule.preset = propanediol-1,2
triple.alpha = 1
triple.beta = 1
triple.gamma = 4
field.E0_grid_kV_cm = 0:20:41
drive.theta_grid = -180:180:73 deg
```

Grids are written as `start:stop:count` (inclusive) or as comma-separated lists, angles carry a
`deg` or `rad` suffix.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Callable, TypeVar

import numpy as np

from enantiostark._exceptions import ArgumentError, ConfigError
from enantiostark._rotor import PRESETS, MoleculeSpec, get_preset
from enantiostark._selection import TransitionTriple

T = TypeVar("T")

#: Default time window of the dynamics in microseconds
DEFAULT_T_GRID = tuple(np.linspace(0.0, 10.0, 1001))

#: Default beam-2 angle grid in rad
DEFAULT_THETA_GRID = tuple(np.linspace(-math.pi, math.pi, 73))

#: Forbidden angle of the left-handed enantiomer if neither configured nor derivable
DEFAULT_THETA_F_L = math.pi / 2

_MOLECULE_KEYS = {
    "A": "molecule.A_MHz",
    "B": "molecule.B_MHz",
    "C": "molecule.C_MHz",
    "d_a": "molecule.d_a_D",
    "d_b": "molecule.d_b_D",
    "d_c": "molecule.d_c_D",
}
_TRIPLE_KEYS = {"alpha": "triple.alpha", "beta": "triple.beta", "gamma": "triple.gamma"}

KEYS = (
    "molecule.preset",
    *_MOLECULE_KEYS.values(),
    "molecule.name",
    *_TRIPLE_KEYS.values(),
    "field.E0_kV_cm",
    "field.E0_grid_kV_cm",
    "spectrum.M",
    "spectrum.levels",
    "basis.J_max",
    "basis.rel_tol",
    "drive.Omega1_MHz",
    "drive.Omega2_MHz",
    "drive.Delta1_MHz",
    "drive.Delta2_MHz",
    "drive.theta",
    "drive.theta_grid",
    "drive.theta_f_L",
    "time.t_grid_us",
    "decay.kappa_MHz",
    "probe.Omega2_MHz",
    "output.path",
    "run.max_workers",
)

_ANGLE_PATTERN = re.compile(r"^(?P<value>.*?)\s*(?P<unit>deg|rad)$")


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse `start:stop:count` (inclusive linspace) or a comma-separated list of floats."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:  # noqa: PLR2004
            raise ValueError(f"Expected start:stop:count, got {text!r}")
        count = int(parts[2])
        if count < 1:
            raise ValueError(f"Grid needs at least one point, got count={count}")
        return tuple(float(value) for value in np.linspace(float(parts[0]), float(parts[1]), count))
    values = tuple(float(value) for value in text.split(",") if value.strip())
    if not values:
        raise ValueError("Empty grid")
    return values


def _split_angle_unit(text: str) -> tuple[str, float]:
    match = _ANGLE_PATTERN.match(text.strip())
    if not match:
        raise ValueError(f"Angle needs a unit suffix 'deg' or 'rad', got {text!r}")
    scale = math.pi / 180 if match["unit"] == "deg" else 1.0
    return match["value"], scale


def parse_angle(text: str) -> float:
    """Parse an angle with unit suffix (`90 deg`, `1.5708 rad`) into rad."""
    value, scale = _split_angle_unit(text)
    return float(value) * scale


def parse_angle_grid(text: str) -> tuple[float, ...]:
    """Parse a grid of angles with a common unit suffix into rad."""
    value, scale = _split_angle_unit(text)
    return tuple(angle * scale for angle in parse_grid(value))


def _format_grid(values: tuple[float, ...]) -> str:
    return ", ".join(repr(value) for value in values)


def _parse_int_list(text: str) -> tuple[int, ...]:
    values = tuple(int(value) for value in text.split(",") if value.strip())
    if not values:
        raise ValueError("Empty list")
    return values


def _parse_J_max(text: str) -> int | None:
    return None if text.strip() == "auto" else int(text)


def _remove_none_values(dct: dict[str, Any]) -> dict[str, Any]:
    return {k: v for k, v in dct.items() if v is not None}


class _Entries:
    """Raw key/value pairs with the line they came from."""

    def __init__(self, entries: dict[str, tuple[str, int | None]]):
        for key, (_, line) in entries.items():
            if key not in KEYS:
                raise ConfigError("Unknown key", key=key, line=line)
        self._entries = entries

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def line(self, key: str) -> int | None:
        return self._entries[key][1] if key in self._entries else None

    def get(self, key: str, parse: Callable[[str], T], default: T) -> T:
        if key not in self._entries:
            return default
        value, line = self._entries[key]
        try:
            return parse(value)
        except ValueError as e:
            raise ConfigError(f"Invalid value {value!r} ({e})", key=key, line=line) from e

    def require(self, key: str, parse: Callable[[str], T]) -> T:
        if key not in self._entries:
            raise ConfigError("Missing key", key=key)
        return self.get(key, parse, None)  # type: ignore[arg-type]


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a command-line run. Frequencies in MHz, fields in kV/cm, angles in rad."""

    molecule: MoleculeSpec | None = None  #: Molecule (left-handed form)
    triple: TransitionTriple | None = None  #: Levels of the cascade
    E0: float | None = None  #: Single static field strength
    E0_grid: tuple[float, ...] | None = None  #: Grid of static field strengths
    M_blocks: tuple[int, ...] = (0, 1, -1)  #: Blocks listed by the spectrum command
    levels: int = 6  #: Number of levels per block listed by the spectrum command
    J_max: int | None = None  #: Basis truncation, None to converge automatically
    rel_tol: float = 1e-8  #: Relative energy tolerance of the automatic basis truncation
    Omega1: float = 1.0  #: Rabi frequency of beam 1
    Omega2: float = 1.0  #: Rabi frequency of beam 2 for the dynamics
    Delta1: float = 0.1  #: One-photon detuning
    Delta2: float = 0.4  #: Two-photon detuning increment
    theta: float | None = None  #: Beam-2 polarization angle of the dynamics
    theta_grid: tuple[float, ...] | None = None  #: Beam-2 polarization angles of the sweeps
    theta_f_L: float | None = None  #: Forbidden angle of the left-handed enantiomer
    t_grid: tuple[float, ...] | None = None  #: Times of the dynamics in microseconds
    kappa: float = 0.1  #: Spontaneous emission rate
    probe_Omega2: float = 0.1  #: Rabi frequency of beam 2 for the absorption
    output: str | None = None  #: Output path of the CSV
    max_workers: int | None = None  #: Threads of the sweeps

    def times(self) -> tuple[float, ...]:
        return self.t_grid if self.t_grid is not None else DEFAULT_T_GRID

    def thetas(self) -> tuple[float, ...]:
        return self.theta_grid if self.theta_grid is not None else DEFAULT_THETA_GRID

    @classmethod
    def from_text(cls, text: str) -> RunConfig:
        """
        Parse configuration text.

        Raises:
            ConfigError: On syntax errors, unknown or duplicate keys and invalid values
        """
        entries: dict[str, tuple[str, int | None]] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split("#", 1)[0].strip()
            if not content:
                continue
            key, separator, value = content.partition("=")
            key = key.strip()
            if not separator or not key:
                raise ConfigError("Expected 'key = value'", line=number)
            if key in entries:
                raise ConfigError("Duplicate key", key=key, line=number)
            entries[key] = (value.strip(), number)
        return cls._from_entries(_Entries(entries))

    @classmethod
    def from_dict(cls, fields: dict[str, Any]) -> RunConfig:
        """Create `RunConfig` from dict with dotted keys and text values."""
        return cls._from_entries(_Entries({k: (str(v), None) for k, v in fields.items()}))

    @classmethod
    def _from_entries(cls, entries: _Entries) -> RunConfig:
        return cls(
            molecule=_read_molecule(entries),
            triple=_read_triple(entries),
            E0=entries.get("field.E0_kV_cm", float, None),
            E0_grid=entries.get("field.E0_grid_kV_cm", parse_grid, None),
            M_blocks=entries.get("spectrum.M", _parse_int_list, cls.M_blocks),
            levels=entries.get("spectrum.levels", int, cls.levels),
            J_max=entries.get("basis.J_max", _parse_J_max, None),
            rel_tol=entries.get("basis.rel_tol", float, cls.rel_tol),
            Omega1=entries.get("drive.Omega1_MHz", float, cls.Omega1),
            Omega2=entries.get("drive.Omega2_MHz", float, cls.Omega2),
            Delta1=entries.get("drive.Delta1_MHz", float, cls.Delta1),
            Delta2=entries.get("drive.Delta2_MHz", float, cls.Delta2),
            theta=entries.get("drive.theta", parse_angle, None),
            theta_grid=entries.get("drive.theta_grid", parse_angle_grid, None),
            theta_f_L=entries.get("drive.theta_f_L", parse_angle, None),
            t_grid=entries.get("time.t_grid_us", parse_grid, None),
            kappa=entries.get("decay.kappa_MHz", float, cls.kappa),
            probe_Omega2=entries.get("probe.Omega2_MHz", float, cls.probe_Omega2),
            output=entries.get("output.path", str, None),
            max_workers=entries.get("run.max_workers", int, None),
        )

    def to_dict(self) -> dict[str, str]:
        """Convert into dict with dotted keys and text values (inverse of `from_dict`)."""
        result: dict[str, str | None] = {}
        if self.molecule is not None:
            preset = PRESETS.get(self.molecule.name or "")
            if preset is not None and preset == self.molecule:
                result["molecule.preset"] = self.molecule.name
            else:
                for attribute, key in _MOLECULE_KEYS.items():
                    result[key] = repr(getattr(self.molecule, attribute))
                result["molecule.name"] = self.molecule.name
        if self.triple is not None:
            for attribute, key in _TRIPLE_KEYS.items():
                result[key] = str(getattr(self.triple, attribute))

        def optional(value: Any, convert: Callable[[Any], str]) -> str | None:
            return None if value is None else convert(value)

        result.update(
            {
                "field.E0_kV_cm": optional(self.E0, repr),
                "field.E0_grid_kV_cm": optional(self.E0_grid, _format_grid),
                "spectrum.M": ", ".join(str(M) for M in self.M_blocks),
                "spectrum.levels": str(self.levels),
                "basis.J_max": "auto" if self.J_max is None else str(self.J_max),
                "basis.rel_tol": repr(self.rel_tol),
                "drive.Omega1_MHz": repr(self.Omega1),
                "drive.Omega2_MHz": repr(self.Omega2),
                "drive.Delta1_MHz": repr(self.Delta1),
                "drive.Delta2_MHz": repr(self.Delta2),
                "drive.theta": optional(self.theta, lambda v: f"{v!r} rad"),
                "drive.theta_grid": optional(self.theta_grid, lambda v: f"{_format_grid(v)} rad"),
                "drive.theta_f_L": optional(self.theta_f_L, lambda v: f"{v!r} rad"),
                "time.t_grid_us": optional(self.t_grid, _format_grid),
                "decay.kappa_MHz": repr(self.kappa),
                "probe.Omega2_MHz": repr(self.probe_Omega2),
                "output.path": self.output,
                "run.max_workers": optional(self.max_workers, str),
            }
        )
        return _remove_none_values(result)

    def to_text(self) -> str:
        """Serialize into configuration text that parses back to an equal `RunConfig`."""
        fields = self.to_dict()
        return "".join(f"{key} = {fields[key]}\n" for key in KEYS if key in fields)


def _read_molecule(entries: _Entries) -> MoleculeSpec | None:
    inline = [key for key in _MOLECULE_KEYS.values() if key in entries]
    if "molecule.preset" in entries:
        if inline:
            raise ConfigError(
                "Preset and inline molecule constants are mutually exclusive",
                key=inline[0],
                line=entries.line(inline[0]),
            )
        name = entries.require("molecule.preset", str)
        return get_preset(name)
    if not inline:
        return None
    values = {attribute: entries.require(key, float) for attribute, key in _MOLECULE_KEYS.items()}
    try:
        return MoleculeSpec(**values, name=entries.get("molecule.name", str, None))
    except ArgumentError as e:
        raise ConfigError(str(e), key="molecule", line=entries.line(inline[0])) from e


def _read_triple(entries: _Entries) -> TransitionTriple | None:
    if not any(key in entries for key in _TRIPLE_KEYS.values()):
        return None
    values = {attribute: entries.require(key, int) for attribute, key in _TRIPLE_KEYS.items()}
    try:
        return TransitionTriple(**values)
    except ArgumentError as e:
        raise ConfigError(str(e), key="triple", line=entries.line("triple.alpha")) from e
