"""Two-particle world model and the sequence executor.

The world holds four registers: the measured particle's spin and axial mode
(``p.spin``, ``p.mode``) and the coolant ion's (``be.spin``, ``be.mode``).
The measured particle is always called ``p`` in scripts, whether it is a
proton or an antiproton.

Readout convention: after the canonical detection sequence the coolant ends
in spin-down exactly when the proton started spin-down. The coolant spin
state that counts as Bright is configurable (``bright_spin``) and defaults
to down, so that Bright means "proton was down".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import dynamics
from .dynamics import ExchangeParams, PulseParams, Sideband
from .errors import PreconditionViolated
from .readout import FluorescenceParams, Outcome, count_likelihoods, classify
from .sequence import (
    START_LOCATIONS,
    Cool,
    Detect,
    Exchange,
    Pulse,
    Pump,
    Sequence,
    Shuttle,
    canonical_detection_sequence,
    step_violations,
)
from .state import (
    DEFAULT_N_MAX,
    DOWN,
    UP,
    CompositeState,
    RegisterSpec,
    apply_kraus,
    apply_operator,
    make_pure_state,
    make_thermal_mode,
    partial_trace,
    population,
    replace_register,
    tensor,
)
from .trap import (
    BERYLLIUM_ION,
    PROTON,
    ParticleSpecies,
    TrapArrayConfig,
    apply_shuttle_heating,
    exchange_rate,
)

P_SPIN, P_MODE, BE_SPIN, BE_MODE = "p.spin", "p.mode", "be.spin", "be.mode"
SPIN_OF = {"p": P_SPIN, "be": BE_SPIN}
MODE_OF = {"p": P_MODE, "be": BE_MODE}


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything the executor needs besides the script itself."""

    trap: TrapArrayConfig = field(default_factory=TrapArrayConfig)
    particle: ParticleSpecies = PROTON
    coolant: ParticleSpecies = BERYLLIUM_ION
    fluorescence: FluorescenceParams = field(default_factory=FluorescenceParams)
    photon_sampling: bool = True
    bright_spin: int = DOWN
    n_max: int = DEFAULT_N_MAX
    default_pulse_duration: float = 1e-4

    @property
    def exchange_rate(self) -> float:
        return exchange_rate(self.particle, self.coolant, self.trap.well_separation_d, self.trap.coupling_frequency)


@dataclass(frozen=True)
class Event:
    index: int
    step: object
    p_bright: Optional[float] = None
    photons: Optional[int] = None
    outcome: Optional[Outcome] = None


@dataclass(frozen=True, eq=False)
class WorldState:
    quantum: CompositeState
    locations: dict = field(default_factory=lambda: dict(START_LOCATIONS))
    step_log: tuple = ()

    def __post_init__(self):
        if sorted(self.quantum.labels) != sorted([P_SPIN, P_MODE, BE_SPIN, BE_MODE]):
            raise ValueError(f"world needs registers p.spin, p.mode, be.spin, be.mode; got {self.quantum.labels}")
        if set(self.locations) != {"p", "be"}:
            raise ValueError("world tracks exactly the particles p and be")


def _spin_state(spec, label):
    reg = RegisterSpec.spin(label)
    if isinstance(spec, str):
        if spec == "down":
            return make_pure_state([reg], {label: DOWN})
        if spec == "up":
            return make_pure_state([reg], {label: UP})
        if spec == "plus":
            return CompositeState((reg,), np.full((2, 2), 0.5, dtype=complex))
        if spec == "mixed":
            return CompositeState((reg,), np.eye(2, dtype=complex) / 2)
        raise ValueError(f"unknown spin preparation {spec!r}")
    if isinstance(spec, CompositeState):
        return CompositeState((reg,), spec.rho)
    return CompositeState((reg,), np.asarray(spec, dtype=complex))


def make_world(
    cfg: ProtocolConfig,
    proton_spin="down",
    proton_nbar: float = 0.0,
    coolant_spin="up",
    locations: Optional[dict] = None,
) -> WorldState:
    """Initial world: proton in the precision zone, coolant in the cooling zone.

    ``proton_spin`` is ``"down"``, ``"up"``, ``"plus"``, ``"mixed"``, a 2x2
    density matrix or a single-spin :class:`CompositeState`.
    """
    q = tensor(
        tensor(_spin_state(proton_spin, P_SPIN), make_thermal_mode(proton_nbar, cfg.n_max, P_MODE)),
        tensor(_spin_state(coolant_spin, BE_SPIN), make_thermal_mode(0.0, cfg.n_max, BE_MODE)),
    )
    return WorldState(q, dict(START_LOCATIONS if locations is None else locations))


def bright_probability(w: WorldState, cfg: ProtocolConfig) -> float:
    return population(w.quantum, {BE_SPIN: cfg.bright_spin})


def _projector(index):
    p = np.zeros((2, 2))
    p[index, index] = 1.0
    return p


def _pulse(q, step: Pulse, cfg):
    params = PulseParams(
        theta=step.theta,
        phi=step.phi or 0.0,
        detuning=2.0 * math.pi * (step.detuning_hz or 0.0),
        duration=step.duration_s or cfg.default_pulse_duration,
    )
    spin, mode = SPIN_OF[step.particle], MODE_OF[step.particle]
    if step.kind == "carrier":
        return dynamics.carrier_pulse(q, spin, params)
    sideband = Sideband.BLUE if step.kind.endswith("bsb") else Sideband.RED
    return dynamics.sideband_pulse(q, spin, mode, sideband, params)


def _detect(q, cfg, rng, sample):
    p_bright = population(q, {BE_SPIN: cfg.bright_spin})
    dark_spin = 1 - cfg.bright_spin
    pb, pd = _projector(cfg.bright_spin), _projector(dark_spin)
    if not sample:
        q = apply_kraus(q, [BE_SPIN], [pb, pd])
        return q, Event(0, None, p_bright)
    is_bright = rng.random() < p_bright
    if not cfg.photon_sampling:
        out = _collapse(q, pb if is_bright else pd)
        return out, Event(0, None, p_bright, None, Outcome.BRIGHT if is_bright else Outcome.DARK)
    fp = cfg.fluorescence
    count = int(rng.poisson(fp.lambda_bright if is_bright else fp.lambda_dark))
    lb, ld = count_likelihoods(count, fp)
    kraus = math.sqrt(lb) * pb + math.sqrt(ld) * pd
    out = _collapse(q, kraus)
    return out, Event(0, None, p_bright, count, classify(count, fp))


def _collapse(q: CompositeState, kraus) -> CompositeState:
    rho = apply_operator(q, [BE_SPIN], kraus)
    rho = rho / np.trace(rho).real
    return CompositeState(q.registers, 0.5 * (rho + rho.conj().T), q.trace_tolerance, q.leaked_weight)


def apply_step(w: WorldState, step, cfg: ProtocolConfig, rng=None, sample=True, index=None):
    """Execute one step; returns ``(world, event)``. Checks zone rules at runtime."""
    problems = step_violations(step, w.locations, cfg.trap)
    if problems:
        raise PreconditionViolated("; ".join(problems))
    if sample and rng is None and isinstance(step, Detect):
        raise ValueError("sampling a detection needs a random generator")
    index = len(w.step_log) if index is None else index
    q = w.quantum
    locations = w.locations
    event = Event(index, step)
    if isinstance(step, Shuttle):
        if locations[step.particle] != step.zone:
            q = apply_shuttle_heating(q, MODE_OF[step.particle], cfg.trap.heating_quanta_per_shuttle)
            locations = {**locations, step.particle: step.zone}
    elif isinstance(step, Pulse):
        q = _pulse(q, step, cfg)
    elif isinstance(step, Exchange):
        rate = cfg.exchange_rate
        theta = step.theta if step.theta is not None else rate * step.duration_s
        x = ExchangeParams(theta, cfg.trap.exchange_mode_detuning, rate)
        q = dynamics.exchange(q, P_MODE, BE_MODE, x)
    elif isinstance(step, Pump):
        q = replace_register(q, BE_SPIN, _spin_state("up", BE_SPIN))
    elif isinstance(step, Cool):
        q = replace_register(q, P_MODE, make_thermal_mode(step.nbar, q.register(P_MODE).n_max, P_MODE))
    elif isinstance(step, Detect):
        q, det = _detect(q, cfg, rng, sample)
        event = replace(det, index=index, step=step)
    else:
        raise TypeError(f"not a step: {step!r}")
    return WorldState(q, locations, w.step_log + (event,)), event


def execute(seq: Sequence, w: WorldState, cfg: ProtocolConfig, rng=None, sample=True):
    """Run every step of ``seq``; returns the final world and this run's events.

    With ``sample=False`` detections are non-selective (the coolant spin is
    dephased) and each detection event carries only the exact Bright
    probability.
    """
    events = []
    for step in seq.steps:
        w, ev = apply_step(w, step, cfg, rng, sample)
        events.append(ev)
    return w, events


def replay(events, w0: WorldState, cfg: ProtocolConfig, rng=None, sample=True):
    """Re-run logged steps from ``w0``; with the same seed the result is identical."""
    seq = Sequence(tuple(e.step for e in events), "replay")
    return execute(seq, w0, cfg, rng, sample)


@dataclass(frozen=True)
class DetectionParams:
    bsb_theta: float = math.pi
    exchange_theta: float = math.pi / 2
    raman_theta: float = math.pi


def spin_detection_protocol(w: WorldState, cfg: ProtocolConfig, params: DetectionParams = DetectionParams(),
                            rng=None, sample=True):
    """Canonical detection sequence; returns ``(outcome, world)``.

    ``outcome`` is ``None`` when ``sample`` is false; the exact Bright
    probability is then in the last logged event.
    """
    seq = canonical_detection_sequence(params.bsb_theta, params.exchange_theta, params.raman_theta)
    w, events = execute(seq, w, cfg, rng, sample)
    return events[-1].outcome, w


def detection_probability(w: WorldState, cfg: ProtocolConfig, params: DetectionParams = DetectionParams()) -> float:
    """Exact probability that the detection step reads Bright spin (before photon noise)."""
    _, w = spin_detection_protocol(w, cfg, params, sample=False)
    return w.step_log[-1].p_bright


def pump(w: WorldState, cfg: ProtocolConfig, particle: str = "be") -> WorldState:
    return apply_step(w, Pump(particle), cfg)[0]


def cool(w: WorldState, cfg: ProtocolConfig, nbar_residual: float = 0.0) -> WorldState:
    return apply_step(w, Cool(nbar_residual), cfg)[0]


def reinitialize_proton(cfg: ProtocolConfig, proton_spin="mixed", params: DetectionParams = DetectionParams(),
                        proton_nbar: float = 0.0) -> CompositeState:
    """Proton spin state left behind by one unread detection pass."""
    w = make_world(cfg, proton_spin, proton_nbar)
    _, w = spin_detection_protocol(w, cfg, params, sample=False)
    return partial_trace(w.quantum, [P_SPIN])
