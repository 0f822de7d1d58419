"""Line-oriented sequence scripts: parsing, canonical printing and zone validation.

Grammar (``#`` starts a comment)::

    shuttle <p|be> <a|b|c|d>
    pulse <carrier|bsb|rsb|raman_bsb|raman_rsb> <p|be> theta=<expr> [phi=<expr>]
          [detuning_hz=<number>] [duration_s=<number>]
    exchange theta=<expr>
    exchange duration_s=<number>
    pump <particle>
    cool nbar=<number>
    detect <particle>

``<expr>`` is a product/quotient of numbers and ``pi``, e.g. ``3*pi/4``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import MalformedNumber, SequenceSyntaxError, UnknownKeyword
from .trap import ZONE_IDS, TrapArrayConfig, ZoneRole

PARTICLES = ("p", "be")
PULSE_KINDS = ("carrier", "bsb", "rsb", "raman_bsb", "raman_rsb")
START_LOCATIONS = {"p": "a", "be": "d"}


@dataclass(frozen=True)
class Shuttle:
    particle: str
    zone: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Pulse:
    kind: str
    particle: str
    theta: float
    phi: Optional[float] = None
    detuning_hz: Optional[float] = None
    duration_s: Optional[float] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Exchange:
    theta: Optional[float] = None
    duration_s: Optional[float] = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Pump:
    particle: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Cool:
    nbar: float
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Detect:
    particle: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Sequence:
    steps: tuple
    name: str = "sequence"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a sequence needs at least one step")

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class Violation:
    step_index: int
    message: str

    def __str__(self):
        return f"step {self.step_index}: {self.message}"


# parsing ---------------------------------------------------------------------

_NUMBER = r"(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
_NUMBER_RE = re.compile(rf"[-+]?{_NUMBER}\Z")
_FACTOR_RE = re.compile(rf"[-+]?(?:{_NUMBER}|pi)\Z")

_PULSE_KEYS = {"theta": "expr", "phi": "expr", "detuning_hz": "number", "duration_s": "number"}


class _LineError(Exception):
    def __init__(self, column, message, kind=SequenceSyntaxError):
        self.column = column
        self.message = message
        self.kind = kind


def _number(text, column):
    if not _NUMBER_RE.match(text):
        raise _LineError(column, f"malformed number {text!r}", MalformedNumber)
    value = float(text)
    if not math.isfinite(value):
        raise _LineError(column, f"number {text!r} is not finite", MalformedNumber)
    return value


def _expr(text, column):
    parts = re.split(r"([*/])", text)
    value = None
    op = "*"
    offset = 0
    for part in parts:
        if part in ("*", "/"):
            op = part
            offset += 1
            continue
        if not _FACTOR_RE.match(part):
            raise _LineError(column + offset, f"malformed expression {text!r}", MalformedNumber)
        sign = -1.0 if part.startswith("-") else 1.0
        body = part.lstrip("+-")
        f = sign * (math.pi if body == "pi" else float(body))
        if value is None:
            value = f
        elif op == "*":
            value *= f
        else:
            if f == 0:
                raise _LineError(column + offset, "division by zero", MalformedNumber)
            value /= f
        offset += len(part)
    if value is None or not math.isfinite(value):
        raise _LineError(column, f"malformed expression {text!r}", MalformedNumber)
    return value


def _tokens(line):
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _keyvals(args, allowed, end_column):
    out = {}
    for tok, col in args:
        key, eq, raw = tok.partition("=")
        if not eq:
            raise _LineError(col, f"expected key=value, got {tok!r}")
        if key not in allowed:
            raise _LineError(col, f"unknown parameter {key!r}", UnknownKeyword)
        if key in out:
            raise _LineError(col, f"parameter {key!r} given twice")
        vcol = col + len(key) + 1
        if not raw:
            raise _LineError(vcol, f"missing value for {key!r}", MalformedNumber)
        out[key] = (_expr(raw, vcol) if allowed[key] == "expr" else _number(raw, vcol), vcol)
    return out


def _particle(tok, col):
    if tok not in PARTICLES:
        raise _LineError(col, f"unknown particle {tok!r}")
    return tok


def _arity(cmd, args, n, end_column):
    if len(args) < n:
        raise _LineError(end_column, f"'{cmd}' expects {n} argument(s)")
    if len(args) > n:
        raise _LineError(args[n][1], f"unexpected argument {args[n][0]!r}")


def _parse_line(toks, lineno, end_column):
    (cmd, ccol), args = toks[0], toks[1:]
    pos = dict(line=lineno, column=ccol)
    if cmd == "shuttle":
        _arity(cmd, args, 2, end_column)
        particle = _particle(*args[0])
        zone, zcol = args[1]
        if zone not in ZONE_IDS:
            raise _LineError(zcol, f"unknown zone {zone!r}")
        return Shuttle(particle, zone, **pos)
    if cmd == "pulse":
        if len(args) < 2:
            raise _LineError(end_column, "'pulse' expects a type and a particle")
        kind, kcol = args[0]
        if kind not in PULSE_KINDS:
            raise _LineError(kcol, f"unknown pulse type {kind!r}", UnknownKeyword)
        particle = _particle(*args[1])
        kv = _keyvals(args[2:], _PULSE_KEYS, end_column)
        if "theta" not in kv:
            raise _LineError(end_column, "pulse requires theta=")
        if kv["theta"][0] < 0:
            raise _LineError(kv["theta"][1], "theta must be >= 0")
        if "duration_s" in kv and not kv["duration_s"][0] > 0:
            raise _LineError(kv["duration_s"][1], "duration_s must be > 0")
        get = lambda k: kv[k][0] if k in kv else None  # noqa: E731
        return Pulse(kind, particle, get("theta"), get("phi"), get("detuning_hz"), get("duration_s"), **pos)
    if cmd == "exchange":
        kv = _keyvals(args, {"theta": "expr", "duration_s": "number"}, end_column)
        if len(kv) != 1:
            raise _LineError(ccol, "exchange takes exactly one of theta= or duration_s=")
        (key, (value, vcol)), = kv.items()
        if value < 0 or (key == "duration_s" and value == 0):
            raise _LineError(vcol, f"{key} must be positive")
        return Exchange(**{key: value}, **pos)
    if cmd in ("pump", "detect"):
        _arity(cmd, args, 1, end_column)
        particle = _particle(*args[0])
        return (Pump if cmd == "pump" else Detect)(particle, **pos)
    if cmd == "cool":
        kv = _keyvals(args, {"nbar": "number"}, end_column)
        if "nbar" not in kv:
            raise _LineError(end_column, "cool requires nbar=")
        if kv["nbar"][0] < 0:
            raise _LineError(kv["nbar"][1], "nbar must be >= 0")
        return Cool(kv["nbar"][0], **pos)
    raise _LineError(ccol, f"unknown command {cmd!r}", UnknownKeyword)


def parse_sequence(text: str, name: str = "sequence") -> Sequence:
    """Parse a script. All bad lines are reported together in one
    :class:`SequenceSyntaxError` (or subclass, after the first error)."""
    steps = []
    errors = []
    first_kind = None
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip()
        toks = _tokens(line)
        if not toks:
            continue
        try:
            steps.append(_parse_line(toks, lineno, len(line) + 1))
        except _LineError as e:
            errors.append((lineno, e.column, e.message))
            first_kind = first_kind or e.kind
    if not steps and not errors:
        errors.append((max(len(lines), 1), 1, "sequence has no steps"))
        first_kind = SequenceSyntaxError
    if errors:
        raise first_kind(errors)
    return Sequence(tuple(steps), name)


def _fmt(x):
    return repr(float(x))


def format_step(step) -> str:
    if isinstance(step, Shuttle):
        return f"shuttle {step.particle} {step.zone}"
    if isinstance(step, Pulse):
        parts = [f"pulse {step.kind} {step.particle} theta={_fmt(step.theta)}"]
        for key in ("phi", "detuning_hz", "duration_s"):
            value = getattr(step, key)
            if value is not None:
                parts.append(f"{key}={_fmt(value)}")
        return " ".join(parts)
    if isinstance(step, Exchange):
        if step.theta is not None:
            return f"exchange theta={_fmt(step.theta)}"
        return f"exchange duration_s={_fmt(step.duration_s)}"
    if isinstance(step, Pump):
        return f"pump {step.particle}"
    if isinstance(step, Cool):
        return f"cool nbar={_fmt(step.nbar)}"
    if isinstance(step, Detect):
        return f"detect {step.particle}"
    raise TypeError(f"not a step: {step!r}")


def format_sequence(seq: Sequence) -> str:
    return "".join(format_step(s) + "\n" for s in seq.steps)


# validation --------------------------------------------------------------------

def _role(cfg, zone):
    try:
        return cfg.role(zone)
    except KeyError:
        return None


def step_violations(step, locations, cfg: TrapArrayConfig) -> list:
    """Zone-rule violations of ``step`` given current particle ``locations``."""
    out = []
    role = lambda particle: _role(cfg, locations[particle])  # noqa: E731
    if isinstance(step, Shuttle):
        if _role(cfg, step.zone) is None:
            out.append(f"zone {step.zone!r} is not part of the trap array")
        other = "be" if step.particle == "p" else "p"
        if locations[other] == step.zone and _role(cfg, step.zone) is not ZoneRole.COUPLING:
            out.append(f"particles may only share the coupling zone, not zone {step.zone!r}")
    elif isinstance(step, Pulse):
        if step.kind == "carrier":
            want = ZoneRole.PRECISION if step.particle == "p" else ZoneRole.COOLING_DETECTION
            if role(step.particle) is not want:
                out.append(f"carrier pulse on {step.particle} requires the {want.value} zone")
        elif step.kind in ("bsb", "rsb"):
            if step.particle != "p":
                out.append("rf sideband pulses apply to the proton only")
            elif role("p") is not ZoneRole.PROTON_SIDEBAND:
                out.append("rf sideband pulse requires the proton in the proton_sideband zone")
        else:
            if step.particle != "be":
                out.append("raman pulses apply to the coolant ion only")
            elif role("be") is not ZoneRole.COOLING_DETECTION:
                out.append("raman pulse requires the coolant ion in the cooling_detection zone")
    elif isinstance(step, Exchange):
        if not (role("p") is ZoneRole.COUPLING and role("be") is ZoneRole.COUPLING):
            out.append("exchange requires both particles in coupling zone")
    elif isinstance(step, Cool):
        if not (role("p") is ZoneRole.COUPLING and role("be") is ZoneRole.COUPLING):
            out.append("cool requires both particles in coupling zone")
    elif isinstance(step, (Pump, Detect)):
        verb = "pump" if isinstance(step, Pump) else "detect"
        if step.particle != "be":
            out.append(f"{verb} applies to coolant ion only")
        elif role("be") is not ZoneRole.COOLING_DETECTION:
            out.append(f"{verb} requires the coolant ion in the cooling_detection zone")
    return out


def validate(seq: Sequence, cfg: TrapArrayConfig, start: Optional[dict] = None) -> list:
    """Walk ``seq`` from ``start`` locations and report every zone-rule violation."""
    locations = dict(START_LOCATIONS if start is None else start)
    violations = []
    for i, step in enumerate(seq.steps):
        violations.extend(Violation(i, msg) for msg in step_violations(step, locations, cfg))
        if isinstance(step, Shuttle):
            locations[step.particle] = step.zone
    return violations


CANONICAL_DETECTION = """\
# quantum-logic spin detection, proton starts in the precision zone
shuttle p b
pulse bsb p theta=pi
shuttle p c
shuttle be c
exchange theta=pi/2
shuttle be d
pulse raman_bsb be theta=pi
detect be
"""


def canonical_detection_sequence(bsb_theta=math.pi, exchange_theta=math.pi / 2, raman_theta=math.pi) -> Sequence:
    steps = (
        Shuttle("p", "b"),
        Pulse("bsb", "p", bsb_theta),
        Shuttle("p", "c"),
        Shuttle("be", "c"),
        Exchange(theta=exchange_theta),
        Shuttle("be", "d"),
        Pulse("raman_bsb", "be", raman_theta),
        Detect("be"),
    )
    return Sequence(steps, "spin-detection")
