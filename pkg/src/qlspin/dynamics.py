"""Coherent pulse and motional-exchange operations.

Every coupled pair ``(lower, upper)`` evolves under the two-level Hamiltonian

    H = [[ delta/2,              Omega e^{-i phi}/2 ],
         [ Omega e^{+i phi}/2,  -delta/2           ]]

where ``lower`` is the spin-down member of the pair. Pairs never mix, so the
full propagator is the direct sum of these closed-form 2x2 blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimMismatch, TruncationError, WrongRegisterKind
from .state import (
    DOWN,
    LEAK_TOLERANCE,
    MODE,
    SPIN,
    UP,
    CompositeState,
    apply_unitary,
    population,
)


class Sideband(Enum):
    RED = "red"
    BLUE = "blue"


@dataclass(frozen=True)
class PulseParams:
    """Angle-calibrated pulse.

    ``theta`` is the rotation angle on the ``n_cal`` Fock pair at zero
    detuning; the Rabi rate is ``theta / duration`` (rad/s). ``detuning`` is an
    angular frequency (rad/s).
    """

    theta: float
    phi: float = 0.0
    detuning: float = 0.0
    duration: float = 1.0
    n_cal: int = 0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"pulse duration must be > 0, got {self.duration}")
        if self.theta < 0:
            raise ValueError(f"pulse angle must be >= 0, got {self.theta}")
        if self.n_cal < 0:
            raise ValueError("n_cal must be >= 0")

    @property
    def rabi(self) -> float:
        return self.theta / self.duration


@dataclass(frozen=True)
class ExchangeParams:
    """Beam-splitter interaction between two modes.

    ``theta = rate * t``; at ``mode_detuning == 0`` and ``theta == pi/2`` the
    two modes swap. ``rate`` defaults to 1 (natural units).
    """

    theta: float
    mode_detuning: float = 0.0
    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("exchange rate must be > 0")

    @property
    def duration(self) -> float:
        return self.theta / self.rate


def rabi_probability(omega: float, detuning: float, t: float) -> float:
    """Transition probability of a driven two-level system starting in one level."""
    if t < 0:
        raise ValueError("t must be >= 0")
    w2 = omega * omega + detuning * detuning
    if w2 == 0.0:
        return 0.0
    return omega * omega / w2 * np.sin(np.sqrt(w2) * t / 2.0) ** 2


def two_level_propagator(omega: float, detuning: float, phi: float, t: float) -> np.ndarray:
    """``exp(-i H t)`` for the pair Hamiltonian in the module docstring."""
    w = np.hypot(omega, detuning)
    if w == 0.0:
        return np.eye(2, dtype=complex)
    c = np.cos(w * t / 2.0)
    s = np.sin(w * t / 2.0)
    return np.array(
        [
            [c - 1j * s * detuning / w, -1j * s * omega / w * np.exp(-1j * phi)],
            [-1j * s * omega / w * np.exp(1j * phi), c + 1j * s * detuning / w],
        ]
    )


def _require(s: CompositeState, label: str, kind: str):
    reg = s.register(label)
    if reg.kind != kind:
        raise WrongRegisterKind(f"register {label!r} is {reg.kind}, expected {kind}")
    return reg


def carrier_pulse(s: CompositeState, spin: str, p: PulseParams) -> CompositeState:
    _require(s, spin, SPIN)
    u = two_level_propagator(p.rabi, p.detuning, p.phi, p.duration)
    return apply_unitary(s, [spin], u)


def sideband_unitary(n_max: int, sideband: Sideband, p: PulseParams) -> np.ndarray:
    """Propagator on spin (x) mode, joint index ``spin * (n_max+1) + n``."""
    dm = n_max + 1
    u = np.zeros((2 * dm, 2 * dm), dtype=complex)
    half = p.detuning * p.duration / 2.0
    # uncoupled edge states only pick up the diagonal phase
    if sideband is Sideband.BLUE:
        u[UP * dm + 0, UP * dm + 0] = np.exp(1j * half)
        u[DOWN * dm + n_max, DOWN * dm + n_max] = np.exp(-1j * half)
    else:
        u[DOWN * dm + 0, DOWN * dm + 0] = np.exp(-1j * half)
        u[UP * dm + n_max, UP * dm + n_max] = np.exp(1j * half)
    scale = 1.0 / np.sqrt(p.n_cal + 1.0)
    for n in range(n_max):
        omega = p.rabi * np.sqrt(n + 1.0) * scale
        block = two_level_propagator(omega, p.detuning, p.phi, p.duration)
        if sideband is Sideband.BLUE:
            lo, hi = DOWN * dm + n, UP * dm + n + 1
        else:
            lo, hi = DOWN * dm + n + 1, UP * dm + n
        u[np.ix_([lo, hi], [lo, hi])] = block
    return u


def sideband_pulse(s: CompositeState, spin: str, mode: str, sideband: Sideband, p: PulseParams) -> CompositeState:
    _require(s, spin, SPIN)
    reg = _require(s, mode, MODE)
    sideband = Sideband(sideband)
    n_max = reg.n_max
    edge_spin = DOWN if sideband is Sideband.BLUE else UP
    edge = population(s, {spin: edge_spin, mode: n_max})
    if edge > LEAK_TOLERANCE and p.theta > 0:
        raise TruncationError(
            f"{sideband.value} sideband would drive population {edge:.3g} past n_max={n_max} in {mode!r}"
        )
    return apply_unitary(s, [spin, mode], sideband_unitary(n_max, sideband, p))


def _sector_states(total: int, n_max: int):
    lo = max(0, total - n_max)
    hi = min(total, n_max)
    return [(k, total - k) for k in range(lo, hi + 1)]


def exchange_unitary(n_max: int, x: ExchangeParams) -> np.ndarray:
    """Beam-splitter propagator on modeA (x) modeB, built sector by sector.

    ``H = (delta/2)(a^dag a - b^dag b) + rate (a^dag b + b^dag a)`` conserves the
    total phonon number, so each sector is diagonalized separately.
    """
    dm = n_max + 1
    t = x.duration
    u = np.zeros((dm * dm, dm * dm), dtype=complex)
    for total in range(2 * n_max + 1):
        states = _sector_states(total, n_max)
        m = len(states)
        h = np.zeros((m, m))
        for i, (na, nb) in enumerate(states):
            h[i, i] = 0.5 * x.mode_detuning * (na - nb)
            if i + 1 < m:
                # <na+1, nb-1| a^dag b |na, nb>
                h[i + 1, i] = h[i, i + 1] = x.rate * np.sqrt((na + 1.0) * nb)
        w, v = np.linalg.eigh(h)
        block = (v * np.exp(-1j * w * t)) @ v.conj().T
        idx = [na * dm + nb for na, nb in states]
        u[np.ix_(idx, idx)] = block
    return u


def exchange(s: CompositeState, mode_a: str, mode_b: str, x: ExchangeParams) -> CompositeState:
    ra = _require(s, mode_a, MODE)
    rb = _require(s, mode_b, MODE)
    if ra.dim != rb.dim:
        raise DimMismatch(f"modes {mode_a!r} and {mode_b!r} have dims {ra.dim} and {rb.dim}")
    n_max = ra.n_max
    # sectors above n_max are incomplete in the truncated basis
    diag = np.real(np.diagonal(s.rho)).reshape(s.dims)
    ia, ib = s.index(mode_a), s.index(mode_b)
    other = tuple(j for j in range(len(s.dims)) if j not in (ia, ib))
    joint = diag.sum(axis=other)
    if ia > ib:
        joint = joint.T
    n = np.arange(n_max + 1)
    over = joint[(n[:, None] + n[None, :]) > n_max].sum()
    if over > LEAK_TOLERANCE:
        raise TruncationError(f"population {over:.3g} in phonon-number sectors above n_max={n_max}")
    return apply_unitary(s, [mode_a, mode_b], exchange_unitary(n_max, x))
