"""
Temporal profiles
=================

The photon occupies an interval of time as well as of space.  A Gaussian
profile is symmetric about its centre.  The exponential tails reach only
forwards or only backwards in time.
"""

# %%
import numpy as np

from pev_mzi.grid import AxisGrid
from pev_mzi.profiles import Direction, l2_norm, make_exp_tail_temporal, make_gaussian_temporal

grid = AxisGrid(-40.0, 40.0, 0.02)
profiles = {
    "gaussian": make_gaussian_temporal(grid, 0.0, 1.0),
    "forward tail": make_exp_tail_temporal(grid, 0.0, 1.0, Direction.FORWARD),
    "backward tail": make_exp_tail_temporal(grid, 0.0, 1.0, Direction.BACKWARD),
}

# %%
# Each profile is normalised.  The mean arrival time shows which way the tail points.
t = grid.points
for name, prof in profiles.items():
    rho = np.abs(prof.samples) ** 2
    mean = np.sum(t * rho) / np.sum(rho)
    print(f"{name:14s} norm = {l2_norm(prof):.12f}   <t> = {mean:+.4f}")

# %%
# Mass before and after the centre.
for name, prof in profiles.items():
    rho = np.abs(prof.samples) ** 2 * grid.h
    print(f"{name:14s} before: {rho[t < 0].sum():.4f}   after: {rho[t > 0].sum():.4f}")
