"""
Sideband Rabi flopping and motional exchange
============================================

Two building blocks of the sequence. A sideband pulse calibrated as a pi
pulse on the |down,0> <-> |up,1> pair over- or under-rotates the other
pairs because their coupling grows like sqrt(n+1). The Coulomb exchange
swaps two oscillators completely after a quarter of the beat.
"""

import math

import numpy as np

from qlspin.dynamics import ExchangeParams, PulseParams, Sideband, exchange, sideband_pulse
from qlspin.state import RegisterSpec, make_pure_state, population

regs = [RegisterSpec.spin("s"), RegisterSpec.mode("m", 8)]

print("blue sideband, theta = pi calibrated on n = 0")
print(" n   P(down,n -> up,n+1)")
for n in range(5):
    s = sideband_pulse(make_pure_state(regs, {"s": 0, "m": n}), "s", "m", Sideband.BLUE, PulseParams(math.pi))
    print(f"{n:2d}   {population(s, {'s': 1, 'm': n + 1}):.4f}")

# only n = 0 transfers fully; a thermal proton therefore gives reduced contrast

# %%
# Flopping curve on the n = 0 pair
thetas = np.linspace(0, 2 * math.pi, 9)
start = make_pure_state(regs, {"s": 0, "m": 0})
flop = [population(sideband_pulse(start, "s", "m", Sideband.BLUE, PulseParams(t)), {"s": 1}) for t in thetas]
print("\ntheta/pi  P(up)")
for t, p in zip(thetas, flop):
    print(f"{t / math.pi:7.2f}  {p:.3f}")

# %%
# Exchange: one phonon in mode a, none in b
modes = [RegisterSpec.mode("a", 3), RegisterSpec.mode("b", 3)]
one = make_pure_state(modes, {"a": 1, "b": 0})
print("\nexchange angle   P(phonon in b)")
for theta in np.linspace(0, math.pi, 9):
    s = exchange(one, "a", "b", ExchangeParams(theta))
    print(f"{theta / math.pi:8.3f} pi      {population(s, {'a': 0, 'b': 1}):.3f}")

# detuned wells never swap completely
for ratio in (0.5, 1, 2):
    t_max = math.pi / (2 * math.hypot(1.0, ratio / 2))
    s = exchange(one, "a", "b", ExchangeParams(t_max, mode_detuning=ratio))
    print(f"mode detuning {ratio} x rate: best transfer {population(s, {'a': 0, 'b': 1}):.3f}")
