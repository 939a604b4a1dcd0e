"""
Baselines of the interferometer
===============================

With no beamsplitter the photon stays in the upper arm and only D1 clicks.
One beamsplitter splits it evenly.  Two beamsplitters present for all time,
with equal mirror phases, recombine it into D1 again.
"""

# %%
import numpy as np

from pev_mzi import preset, total_probabilities

for name in ["baseline-none", "baseline-bs1-only", "baseline-bs2-only", "baseline-both"]:
    p1, p2 = total_probabilities(preset(name))
    print(f"{name:20s} p_D1 = {p1:.9f}   p_D2 = {p2:.3e}")

# %%
# Only the phase difference between the arms matters.  Sweeping kappa2 with
# kappa1 = pi moves the photon smoothly from D2 to D1.
base = preset("baseline-both")
for kappa2 in np.linspace(0.0, np.pi, 5):
    p1, p2 = total_probabilities(base.with_(kappa2=float(kappa2)))
    print(f"kappa2 = {kappa2:5.3f}   p_D1 = {p1:.6f}   p_D2 = {p2:.6f}")
