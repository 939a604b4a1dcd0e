"""
Delayed choice without retrocausality
=====================================

The second beamsplitter appears at t = 18, after the packet centre has
already passed x = 15 at t = 15.  Only the part of the packet that still
overlaps the presence window gets mixed, so D2 fires with probability q/2.
"""

# %%
from pev_mzi import Detector, detection_curve, preset, total_probabilities
from pev_mzi.scenarios import mixed_mass

s1 = preset("scenario1")
q = mixed_mass(s1, s1.bs2, s1.geometry.alpha5)
p1, p2 = total_probabilities(s1)
print(f"mixed mass q = {q:.6e}, p_D2 = {p2:.6e}, q/2 = {q / 2:.6e}")

# %%
# D2 only clicks late: nothing before t = 23 (window opening at 18 plus 5 to the detectors).
curve = detection_curve(s1, Detector.D2)
first = curve.t_bar[curve.probability > 1e-15][0]
print(f"first D2 window with counts is centred at t = {first:.2f}")

# %%
# A backward tail has already left when the late beamsplitter appears; a
# forward tail has not.
for name in ["scenario2-backward", "scenario2-forward", "scenario2-gaussian", "scenario3"]:
    p1, p2 = total_probabilities(preset(name))
    print(f"{name:20s} p_D1 = {p1:.6f}   p_D2 = {p2:.6e}")
