"""
Choosing the photon-count threshold
===================================

The ion is called Bright when at least ``threshold`` photons arrive in the
detection window. Raising the threshold trades dark-as-bright errors for
bright-as-dark ones.
"""

import numpy as np

from qlspin.readout import FluorescenceParams, discrimination_error, seeded_stream

print("thr  bright->dark  dark->bright  total")
for thr in range(1, 8):
    bd, db = discrimination_error(FluorescenceParams(10, 1, thr))
    print(f"{thr:3d}  {bd:12.2e}  {db:12.2e}  {0.5 * (bd + db):.4f}")

# %%
# Cross-check one threshold by sampling
fp = FluorescenceParams(10, 1, 3)
rng = seeded_stream(7)
n = 200_000
bright_counts = rng.poisson(fp.lambda_bright, n)
dark_counts = rng.poisson(fp.lambda_dark, n)
print(f"\nsampled bright->dark {np.mean(bright_counts < fp.threshold):.2e}, "
      f"dark->bright {np.mean(dark_counts >= fp.threshold):.2e}")
print(f"exact   bright->dark {discrimination_error(fp)[0]:.2e}, dark->bright {discrimination_error(fp)[1]:.2e}")
