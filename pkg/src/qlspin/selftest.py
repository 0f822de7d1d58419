"""Quick invariant checks runnable without pytest (``qlspin selftest``)."""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from . import dynamics, trap
from .dynamics import ExchangeParams, PulseParams, Sideband
from .protocol import P_SPIN, ProtocolConfig, detection_probability, make_world, spin_detection_protocol
from .readout import FluorescenceParams, discrimination_error
from .state import RegisterSpec, make_pure_state, make_thermal_mode, partial_trace, population, tensor


def _truth_table():
    cfg = ProtocolConfig(n_max=3)
    down = detection_probability(make_world(cfg, "down"), cfg)
    up = detection_probability(make_world(cfg, "up"), cfg)
    return abs(down - 1) < 1e-9 and abs(up) < 1e-9, f"P(B|down)={down:.12f} P(B|up)={up:.12f}"


def _reinit():
    cfg = ProtocolConfig(n_max=3)
    worst = 0.0
    for spin in ("down", "up", "plus"):
        _, w = spin_detection_protocol(make_world(cfg, spin), cfg, sample=False)
        worst = max(worst, abs(1 - population(w.quantum, {P_SPIN: 1})))
    return worst < 1e-9, f"max |1 - P(up)| = {worst:.2e}"


def _carrier_vs_closed_form():
    worst = 0.0
    reg = [RegisterSpec.spin("s")]
    for ratio in (0, 0.5, 1, 2, 5):
        for tw in (math.pi / 4, math.pi / 2, math.pi, 2 * math.pi):
            omega = 1.0
            s = dynamics.carrier_pulse(make_pure_state(reg, {"s": 0}), "s",
                                       PulseParams(theta=tw * omega, detuning=ratio * omega, duration=tw))
            worst = max(worst, abs(population(s, {"s": 1}) - dynamics.rabi_probability(omega, ratio * omega, tw)))
    return worst < 1e-9, f"max deviation {worst:.2e}"


def _swap():
    regs = [RegisterSpec.mode("a", 4), RegisterSpec.mode("b", 4)]
    s = make_pure_state(regs, {"a": 3, "b": 0})
    out = dynamics.exchange(s, "a", "b", ExchangeParams(math.pi / 2))
    p = population(out, {"a": 0, "b": 3})
    return abs(p - 1) < 1e-9, f"P(|0,3>) = {p:.12f}"


def _exchange_vs_expm():
    n_max = 3
    dm = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, dm)), 1)
    A, B = np.kron(a, np.eye(dm)), np.kron(np.eye(dm), a)
    x = ExchangeParams(0.7, mode_detuning=0.3, rate=1.0)
    h = 0.5 * x.mode_detuning * (A.T @ A - B.T @ B) + x.rate * (A.T @ B + B.T @ A)
    err = np.max(np.abs(dynamics.exchange_unitary(n_max, x) - expm(-1j * h * x.duration)))
    return err < 1e-10, f"max |U - expm| = {err:.2e}"


def _sideband_sector():
    regs = [RegisterSpec.spin("s"), RegisterSpec.mode("m", 5)]
    rng = np.random.default_rng(1)
    psi = np.zeros(12, complex)
    psi[[0, 1, 2, 6, 7, 8]] = rng.normal(size=6) + 1j * rng.normal(size=6)
    psi /= np.linalg.norm(psi)
    from .state import from_vector

    s = from_vector(regs, psi)
    out = dynamics.sideband_pulse(s, "s", "m", Sideband.BLUE, PulseParams(theta=1.3, detuning=0.4, duration=1.0))

    def sectors(st):
        d = np.real(np.diagonal(st.rho)).reshape(2, 6)
        return np.array([sum(d[sp, n] for sp in (0, 1) for n in range(6) if n - sp == k) for k in range(-1, 6)])

    err = np.max(np.abs(sectors(out) - sectors(s)))
    return err < 1e-10, f"max sector change {err:.2e}"


def _invariance():
    worst = 0.0
    for fc in np.linspace(1e6, 100e6, 12):
        for fz in np.linspace(0.1e6, 0.7e6, 7):
            if fc <= 1.5 * fz:  # outside the f+ > fz hierarchy
                continue
            worst = max(worst, abs(trap.invariance_theorem(trap.eigenfrequencies_from(fc, fz)) / fc - 1))
    return worst < 1e-12, f"max relative error {worst:.2e}"


def _partial_trace():
    a = make_thermal_mode(0.3, 15, "a")
    b = make_pure_state([RegisterSpec.spin("b")], {"b": 1})
    err = np.max(np.abs(partial_trace(tensor(a, b), ["a"]).rho - a.rho))
    return err < 1e-12, f"max deviation {err:.2e}"


def _discrimination():
    bd, db = discrimination_error(FluorescenceParams(10, 1, 3))
    ok = abs(db - (1 - math.exp(-1) * 2.5)) < 1e-12 and abs(bd - math.exp(-10) * 61) < 1e-15
    return ok, f"eps_bright_as_dark={bd:.4e} eps_dark_as_bright={db:.4f}"


CHECKS = {
    "detection truth table": _truth_table,
    "proton re-initialization": _reinit,
    "carrier matches closed form": _carrier_vs_closed_form,
    "exchange full swap": _swap,
    "exchange vs matrix exponential": _exchange_vs_expm,
    "blue sideband sector conservation": _sideband_sector,
    "invariance theorem round trip": _invariance,
    "partial trace of product": _partial_trace,
    "photon discrimination error": _discrimination,
}


def run_selftest():
    """Yield ``(name, passed, detail)`` for every check."""
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as e:  # report, don't abort the remaining checks
            ok, detail = False, f"{type(e).__name__}: {e}"
        yield name, bool(ok), detail
