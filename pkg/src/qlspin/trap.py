"""Trap-array configuration, Penning-trap frequency relations and shuttle heating."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import constants

from .errors import (
    NonPositiveDistance,
    NonPositiveField,
    OrderingViolation,
    TruncationError,
    UnstableTrap,
    WrongRegisterKind,
)
from .state import LEAK_TOLERANCE, MODE, CompositeState

ZONE_IDS = ("a", "b", "c", "d")


class ZoneRole(Enum):
    PRECISION = "precision"
    PROTON_SIDEBAND = "proton_sideband"
    COUPLING = "coupling"
    COOLING_DETECTION = "cooling_detection"


@dataclass(frozen=True)
class ParticleSpecies:
    name: str
    mass: float
    charge: float
    g_true: float
    spin: float = 0.5

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"{self.name}: mass must be > 0")
        if self.charge == 0:
            raise ValueError(f"{self.name}: charge must be nonzero")


BE9_ION_MASS = 9.0121830 * constants.atomic_mass - constants.m_e

PROTON = ParticleSpecies("proton", constants.m_p, constants.e, 5.5856946893)
ANTIPROTON = ParticleSpecies("antiproton", constants.m_p, -constants.e, 5.5856946893)
BERYLLIUM_ION = ParticleSpecies("be9+", BE9_ION_MASS, constants.e, 2.0)

DEFAULT_ZONES = (
    ("a", ZoneRole.PRECISION),
    ("b", ZoneRole.PROTON_SIDEBAND),
    ("c", ZoneRole.COUPLING),
    ("d", ZoneRole.COOLING_DETECTION),
)


@dataclass(frozen=True)
class TrapArrayConfig:
    """Static description of the trap array.

    ``axial_hz`` maps zone id to the axial frequency of the measured particle
    there; zone ``c`` holds both particles at the common double-well frequency.
    ``exchange_mode_detuning`` is in rad/s.
    """

    b_field: float = 5.0
    zones: tuple = DEFAULT_ZONES
    axial_hz: dict = field(default_factory=lambda: {"a": 600e3, "b": 1.0e6, "c": 400e3, "d": 1.0e6})
    well_separation_d: float = 100e-6
    heating_quanta_per_shuttle: float = 0.0
    exchange_mode_detuning: float = 0.0

    def __post_init__(self):
        if not self.b_field > 0:
            raise NonPositiveField(f"magnetic field must be > 0, got {self.b_field}")
        zones = tuple((z, ZoneRole(r)) for z, r in self.zones)
        object.__setattr__(self, "zones", zones)
        for z, _ in zones:
            if z not in ZONE_IDS:
                raise ValueError(f"unknown zone id {z!r}")
        if {r for _, r in zones} != set(ZoneRole):
            missing = set(ZoneRole) - {r for _, r in zones}
            raise ValueError(f"trap array lacks zone roles {sorted(r.value for r in missing)}")
        if not self.well_separation_d > 0:
            raise NonPositiveDistance("well separation must be > 0")
        if self.heating_quanta_per_shuttle < 0:
            raise ValueError("heating per shuttle must be >= 0")

    def role(self, zone: str) -> ZoneRole:
        for z, r in self.zones:
            if z == zone:
                return r
        raise KeyError(f"zone {zone!r} not in trap array")

    def zones_with(self, role: ZoneRole) -> list:
        return [z for z, r in self.zones if r is role]

    @property
    def coupling_frequency(self) -> float:
        return self.axial_hz[self.zones_with(ZoneRole.COUPLING)[0]]

    @property
    def precision_axial_frequency(self) -> float:
        return self.axial_hz[self.zones_with(ZoneRole.PRECISION)[0]]


@dataclass(frozen=True)
class TrapFrequencies:
    f_plus: float
    f_z: float
    f_minus: float

    def check(self):
        if not (self.f_plus > self.f_z >= self.f_minus >= 0):
            raise OrderingViolation(f"expected f_plus > f_z >= f_minus >= 0, got {self}")
        return self

    def as_array(self):
        return np.array([self.f_plus, self.f_z, self.f_minus])


def free_cyclotron_frequency(sp: ParticleSpecies, b: float) -> float:
    if not b > 0:
        raise NonPositiveField(f"magnetic field must be > 0, got {b}")
    return abs(sp.charge) * b / (2.0 * math.pi * sp.mass)


def larmor_frequency_truth(sp: ParticleSpecies, b: float) -> float:
    return 0.5 * sp.g_true * free_cyclotron_frequency(sp, b)


def invariance_theorem(tf: TrapFrequencies) -> float:
    """Free cyclotron frequency from the three trap eigenfrequencies."""
    tf.check()
    return math.sqrt(tf.f_plus**2 + tf.f_z**2 + tf.f_minus**2)


def eigenfrequencies_from(fc: float, fz: float) -> TrapFrequencies:
    """Ideal-trap modified cyclotron and magnetron frequencies."""
    disc = fc * fc - 2.0 * fz * fz
    if not disc > 0:
        raise UnstableTrap(f"fc={fc} Hz cannot confine fz={fz} Hz (need fc^2 > 2 fz^2)")
    root = math.sqrt(disc)
    # the small root loses digits as fc - root; use f+ f- = fz^2 / 2
    f_plus = 0.5 * (fc + root)
    f_minus = 0.5 * fz * fz / f_plus
    return TrapFrequencies(f_plus, fz, f_minus)


def exchange_rate(a: ParticleSpecies, b: ParticleSpecies, d: float, f_common: float) -> float:
    """Coulomb beam-splitter rate (rad/s) between two resonant wells ``d`` apart.

    Full state swap takes ``(pi/2) / rate``.
    """
    if not d > 0:
        raise NonPositiveDistance(f"well separation must be > 0, got {d}")
    if not f_common > 0:
        raise ValueError(f"common well frequency must be > 0, got {f_common}")
    k = 1.0 / (4.0 * math.pi * constants.epsilon_0)
    omega = 2.0 * math.pi * f_common
    return k * abs(a.charge * b.charge) / (d**3 * math.sqrt(a.mass * b.mass) * omega)


def exchange_time(a: ParticleSpecies, b: ParticleSpecies, d: float, f_common: float) -> float:
    return 0.5 * math.pi / exchange_rate(a, b, d, f_common)


def _phonon_shift(s: CompositeState, mode: str, w: float) -> CompositeState:
    """``(1-w) rho + w D(rho)``: D dephases ``mode`` and adds one phonon (top level stays put)."""
    i = s.index(mode)
    n = len(s.dims)
    t = np.moveaxis(s.tensor_view(), [i, n + i], [-2, -1])
    diag = np.diagonal(t, axis1=-2, axis2=-1)
    shifted = np.zeros_like(diag)
    shifted[..., 1:] = diag[..., :-1]
    shifted[..., -1] += diag[..., -1]
    d = np.zeros_like(t)
    k = np.arange(t.shape[-1])
    d[..., k, k] = shifted
    out = (1.0 - w) * t + w * d
    out = np.moveaxis(out, [-2, -1], [i, n + i]).reshape(s.rho.shape)
    return CompositeState(s.registers, out, s.trace_tolerance, s.leaked_weight)


def apply_shuttle_heating(s: CompositeState, mode: str, quanta: float) -> CompositeState:
    """Add ``quanta`` mean phonons to ``mode``.

    Each unit of heating is the mixture ``(1-w) rho + w D(rho)`` where ``D``
    moves every Fock population up by one phonon and discards the mode's
    coherences; ``w = quanta`` for ``quanta <= 1``. Larger values are split
    into equal steps of at most one quantum.
    """
    reg = s.register(mode)
    if reg.kind != MODE:
        raise WrongRegisterKind(f"{mode!r} is not a mode register")
    if quanta < 0:
        raise ValueError("heating quanta must be >= 0")
    if quanta == 0:
        return s
    steps = math.ceil(quanta)
    w = quanta / steps
    for _ in range(steps):
        top = _mode_population(s, mode, reg.n_max)
        if w * top > LEAK_TOLERANCE:
            raise TruncationError(
                f"heating pushes {w * top:.3g} past n_max={reg.n_max} in {mode!r}"
            )
        s = _phonon_shift(s, mode, w)
    return s


def _mode_population(s, mode, n):
    diag = np.real(np.diagonal(s.rho)).reshape(s.dims)
    i = s.index(mode)
    return float(np.take(diag, n, axis=i).sum())
