"""
Following the spin through the detection sequence
=================================================

The proton spin cannot be imaged directly. The detection sequence moves
the information step by step: spin -> proton motion -> ion motion -> ion
spin -> photons. Here we print the relevant populations after every step,
once for each proton input.
"""

import numpy as np

from qlspin import ProtocolConfig, canonical_detection_sequence, make_world
from qlspin.protocol import BE_MODE, BE_SPIN, P_MODE, P_SPIN, apply_step
from qlspin.sequence import format_step
from qlspin.state import mean_phonon_number, population

# a small Fock space is plenty: at most one phonon is ever created
cfg = ProtocolConfig(n_max=3, photon_sampling=False)
seq = canonical_detection_sequence()

for spin in ("down", "up"):
    print(f"\nproton starts {spin}")
    print(f"{'step':34s} {'P(p up)':>8s} {'<n_p>':>6s} {'<n_be>':>6s} {'P(be up)':>8s}")
    w = make_world(cfg, spin)
    for step in seq:
        w, ev = apply_step(w, step, cfg, sample=False)
        q = w.quantum
        print(f"{format_step(step):34s} {population(q, {P_SPIN: 1}):8.3f} {mean_phonon_number(q, P_MODE):6.3f} "
              f"{mean_phonon_number(q, BE_MODE):6.3f} {population(q, {BE_SPIN: 1}):8.3f}")
    print(f"P(bright) = {ev.p_bright:.12f}")

# The blue sideband moved the down state into one proton phonon, the exchange
# handed that phonon to the ion, and the ion's sideband turned it into a spin
# flip. The proton is left spin-up either way, ready for the next shot.

# %%
# A mixed input is just the weighted average of the two
p = 0.3
w = make_world(cfg, np.diag([p, 1 - p]))
for step in seq:
    w, ev = apply_step(w, step, cfg, sample=False)
print(f"\nP(bright) for a {p:.0%} down mixture: {ev.p_bright:.12f}")
