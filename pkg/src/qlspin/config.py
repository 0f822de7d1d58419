"""Line-based ``key = value`` run configuration.

Keys are dotted (``trap.b_field_tesla = 5.0``), ``#`` starts a comment,
unknown and duplicate keys are errors. Omitted optional keys take the
defaults in :data:`SCHEMA`; noise-related keys default according to
``noise.preset``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

from scipy import constants

from .dynamics import PulseParams
from .errors import ConfigError, ConfigParseError, MissingRequiredKey, UnknownKey
from .protocol import ProtocolConfig
from .readout import FluorescenceParams
from .scan import ScanConfig
from .sequence import _expr, _LineError
from .state import DOWN, UP
from .trap import BE9_ION_MASS, PROTON, ParticleSpecies, TrapArrayConfig

REQUIRED = object()
PRESET = object()

NOISE_PRESETS = {
    "ideal": {
        "noise.heating_quanta_per_shuttle": 0.0,
        "noise.photon_sampling": False,
        "noise.trap_frequency_relative": 0.0,
    },
    "realistic": {
        "noise.heating_quanta_per_shuttle": 0.1,
        "noise.photon_sampling": True,
        "noise.trap_frequency_relative": 1e-9,
    },
}

_PROTON_MASS = constants.m_p
_E = constants.e
_PROTON_G = PROTON.g_true
_BE9_ION_MASS = BE9_ION_MASS

# key -> (type, default); type is a python type, "angle", or a tuple of choices
SCHEMA = {
    "seed": (int, 0),
    "state.n_max": (int, 15),
    "trap.b_field_tesla": (float, 5.0),
    "trap.zones": (str, "a:precision,b:proton_sideband,c:coupling,d:cooling_detection"),
    "trap.axial_hz.a": (float, 600e3),
    "trap.axial_hz.b": (float, 1.0e6),
    "trap.axial_hz.c": (float, 400e3),
    "trap.axial_hz.d": (float, 1.0e6),
    "trap.well_separation_m": (float, 100e-6),
    "trap.exchange_mode_detuning_rad_s": (float, 0.0),
    "species.proton.mass_kg": (float, _PROTON_MASS),
    "species.proton.charge_c": (float, _E),
    "species.proton.g_true": (float, _PROTON_G),
    "species.antiproton.mass_kg": (float, _PROTON_MASS),
    "species.antiproton.charge_c": (float, -_E),
    "species.antiproton.g_true": (float, _PROTON_G),
    "species.coolant.mass_kg": (float, _BE9_ION_MASS),
    "species.coolant.charge_c": (float, _E),
    "species.coolant.g_true": (float, 2.0),
    "measure.particle": (("proton", "antiproton"), "proton"),
    "noise.preset": (tuple(NOISE_PRESETS), "ideal"),
    "noise.heating_quanta_per_shuttle": (float, PRESET),
    "noise.photon_sampling": (bool, PRESET),
    "noise.trap_frequency_relative": (float, PRESET),
    "noise.cooling_residual_nbar": (float, 0.0),
    "fluorescence.lambda_bright": (float, 10.0),
    "fluorescence.lambda_dark": (float, 1.0),
    "fluorescence.threshold": (int, 3),
    "readout.bright_coolant_spin": (("down", "up"), "down"),
    "scan.start_hz": (float, REQUIRED),
    "scan.stop_hz": (float, REQUIRED),
    "scan.points": (int, 41),
    "scan.shots_per_point": (int, 200),
    "drive.theta": ("angle", math.pi),
    "drive.phi": ("angle", 0.0),
    "drive.duration_s": (float, 0.01),
    "run.proton_spin": (("down", "up", "plus", "mixed"), "down"),
    "output.dir": (str, "."),
}


def _convert(key, raw, lineno):
    kind, _ = SCHEMA[key]
    try:
        if kind is bool:
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError
            return low == "true"
        if kind is int:
            return int(raw)
        if kind is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind == "angle":
            return _expr(raw, 1)
        if isinstance(kind, tuple):
            if raw not in kind:
                raise ConfigParseError(lineno, f"{key} must be one of {', '.join(kind)}, got {raw!r}")
            return raw
        return raw
    except ConfigParseError:
        raise
    except (ValueError, _LineError):
        name = kind if isinstance(kind, str) else kind.__name__
        raise ConfigParseError(lineno, f"bad {name} value {raw!r} for {key}") from None


def parse_entries(text: str) -> dict:
    """Raw ``key -> value string`` map, with syntax, duplicate and unknown-key checks."""
    entries = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not key:
            raise ConfigParseError(lineno, f"expected 'key = value', got {line!r}")
        if not value:
            raise ConfigParseError(lineno, f"missing value for {key}")
        if key in seen:
            raise ConfigParseError(lineno, f"duplicate key {key} (first set on line {seen[key]})")
        if key not in SCHEMA:
            raise UnknownKey(lineno, f"unknown key {key}")
        _convert(key, value, lineno)
        seen[key] = lineno
        entries[key] = value
    return entries


def canonical_text(entries: dict) -> str:
    return "".join(f"{k} = {entries[k]}\n" for k in sorted(entries))


def resolve(entries: dict, lines: Optional[dict] = None) -> dict:
    lines = lines or {}
    values = {k: _convert(k, v, lines.get(k, 0)) for k, v in entries.items()}
    preset = values.get("noise.preset", SCHEMA["noise.preset"][1])
    out = {}
    for key, (_, default) in SCHEMA.items():
        if key in values:
            out[key] = values[key]
        elif default is REQUIRED:
            raise MissingRequiredKey(f"missing required key {key}")
        elif default is PRESET:
            out[key] = NOISE_PRESETS[preset][key]
        else:
            out[key] = default
    return out


def _zones(spec):
    zones = []
    for item in spec.split(","):
        zone, sep, role = item.strip().partition(":")
        if not sep:
            raise ConfigError(f"trap.zones entry {item!r} is not zone:role")
        zones.append((zone.strip(), role.strip()))
    return tuple(zones)


@dataclass(frozen=True)
class RunConfig:
    protocol: ProtocolConfig
    species: dict
    scan: ScanConfig
    seed: int
    trap_noise: float
    residual_nbar: float
    proton_spin: str
    output_dir: str
    entries: dict

    @property
    def config_digest(self) -> str:
        return hashlib.sha256(canonical_text(self.entries).encode()).hexdigest()

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed, scan=replace(self.scan, seed=seed))


def build(entries: dict) -> RunConfig:
    v = resolve(entries)
    try:
        species = {
            name: ParticleSpecies(
                name,
                v[f"species.{name}.mass_kg"],
                v[f"species.{name}.charge_c"],
                v[f"species.{name}.g_true"],
            )
            for name in ("proton", "antiproton", "coolant")
        }
        trap = TrapArrayConfig(
            b_field=v["trap.b_field_tesla"],
            zones=_zones(v["trap.zones"]),
            axial_hz={z: v[f"trap.axial_hz.{z}"] for z in "abcd"},
            well_separation_d=v["trap.well_separation_m"],
            heating_quanta_per_shuttle=v["noise.heating_quanta_per_shuttle"],
            exchange_mode_detuning=v["trap.exchange_mode_detuning_rad_s"],
        )
        protocol = ProtocolConfig(
            trap=trap,
            particle=species[v["measure.particle"]],
            coolant=species["coolant"],
            fluorescence=FluorescenceParams(
                v["fluorescence.lambda_bright"], v["fluorescence.lambda_dark"], v["fluorescence.threshold"]
            ),
            photon_sampling=v["noise.photon_sampling"],
            bright_spin=DOWN if v["readout.bright_coolant_spin"] == "down" else UP,
            n_max=v["state.n_max"],
        )
        drive = PulseParams(theta=v["drive.theta"], phi=v["drive.phi"], duration=v["drive.duration_s"])
        scan = ScanConfig(
            v["scan.start_hz"], v["scan.stop_hz"], v["scan.points"], v["scan.shots_per_point"], drive, v["seed"]
        )
    except ConfigError:
        raise
    except (ValueError, KeyError) as e:  # invariant checks in the domain types
        raise ConfigError(str(e)) from None
    if v["noise.trap_frequency_relative"] < 0 or v["noise.cooling_residual_nbar"] < 0:
        raise ConfigError("noise levels must be >= 0")
    return RunConfig(
        protocol, species, scan, v["seed"], v["noise.trap_frequency_relative"],
        v["noise.cooling_residual_nbar"], v["run.proton_spin"], v["output.dir"], dict(entries),
    )


def parse_config(text: str) -> RunConfig:
    return build(parse_entries(text))


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config_text() -> str:
    return resources.files("qlspin").joinpath("data/default.cfg").read_text(encoding="utf-8")
