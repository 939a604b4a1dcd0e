"""
A temporal profile from its spectrum
====================================

A Gaussian spectrum centred at zero frequency synthesises a Gaussian pulse.
The pulse then runs through the scenario 1 interferometer like any other profile.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from pev_mzi import Photon, preset, total_probabilities
from pev_mzi.grid import AxisGrid
from pev_mzi.profiles import l2_norm, parse_spectrum, synthesize_from_spectrum

omega = np.linspace(-8.0, 8.0, 321)
amplitude = np.exp(-omega**2 / 2.0)
text = "\n".join(f"{w:.6f} {a:.12e}" for w, a in zip(omega, amplitude))
spectrum = parse_spectrum(text)

# %%
grid = AxisGrid(-10.0, 10.0, 0.02)
pulse = synthesize_from_spectrum(grid, spectrum, 0.0)
print(f"norm {l2_norm(pulse):.12f}, peak |gamma|^2 at t = {grid.points[np.argmax(np.abs(pulse.samples))]:.2f}")

# %%
# The same spectrum from a file drives a full scenario.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "spectrum.txt"
    path.write_text(text + "\n")
    s = preset("scenario1").with_(photon=Photon(temporal="spectrum", spectrum_path=str(path)))
    p1, p2 = total_probabilities(s)
    print(f"spectrum pulse in scenario1: p_D1 = {p1:.6f}, p_D2 = {p2:.6e}")
