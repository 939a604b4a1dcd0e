"""Step-by-step evolution of the photon on a discretised (t, x) grid.

The state holds one complex amplitude array per channel.  Every evolution
operator returns a new state; :func:`run_pipeline` applies the seven
interferometer steps, renormalising after each one and recording the norm
before renormalisation in a :class:`StepLog`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnnihilationError, DomainError, DomainOverflowError
from .grid import AxisGrid, window_weights
from .optics import Beamsplitter, Detector, bs_matrix
from .profiles import SpatialProfile, TemporalProfile
from .regions import SpacetimeRegion, contains
from .scenarios import Scenario, build_profiles

#: Largest fraction of the norm a translation may push off the grid.
OVERFLOW_TOL = 1e-9
#: States with a smaller norm are treated as annihilated.
ZERO_NORM = 1e-15


@dataclass(frozen=True, eq=False)
class GridState:
    t_grid: AxisGrid
    x_grid: AxisGrid
    amp1: np.ndarray
    amp2: np.ndarray
    tau_label: str = "tau0"

    def __post_init__(self):
        shape = (self.t_grid.count, self.x_grid.count)
        if self.amp1.shape != shape or self.amp2.shape != shape:
            raise ValueError(f"amplitude arrays must have shape {shape}")

    @property
    def cell_area(self) -> float:
        return self.t_grid.h * self.x_grid.h

    def channel_mass(self, channel: int) -> float:
        amp = self.amp1 if channel == 0 else self.amp2
        return float(np.sum(amp.real**2 + amp.imag**2) * self.cell_area)

    def norm(self) -> float:
        return math.sqrt(self.channel_mass(0) + self.channel_mass(1))

    def density(self, channel: int) -> np.ndarray:
        amp = self.amp1 if channel == 0 else self.amp2
        return amp.real**2 + amp.imag**2

    def _evolve(self, amp1, amp2, label=None):
        return GridState(self.t_grid, self.x_grid, amp1, amp2, label or self.tau_label)


@dataclass
class StepLog:
    entries: list = field(default_factory=list)

    def record(self, tau_label, operator, pre_norm, post_norm):
        self.entries.append((tau_label, operator, pre_norm, post_norm))

    def pre_norms(self):
        return [e[2] for e in self.entries]

    def summary(self) -> str:
        return "\n".join(
            f"{tau:>5}  {op:<40} pre={pre:.15f} post={post:.15f}"
            for tau, op, pre, post in self.entries
        )


def init_source(
    t_grid: AxisGrid, x_grid: AxisGrid, temporal: TemporalProfile, spatial: SpatialProfile
) -> GridState:
    """Photon in channel 1 with the separable amplitude gamma_t(t) * gamma_x(x)."""
    if not temporal.grid.is_aligned_subgrid_of(t_grid):
        raise DomainError("temporal profile grid is not aligned with the t grid")
    if not spatial.grid.is_aligned_subgrid_of(x_grid):
        raise DomainError("spatial profile grid is not aligned with the x grid")
    amp1 = np.outer(temporal(t_grid.points), spatial(x_grid.points))
    return GridState(t_grid, x_grid, amp1, np.zeros_like(amp1), "tau0")


def _shift(a, n_t, n_x):
    out = np.zeros_like(a)
    T, X = a.shape
    src_t = slice(max(0, -n_t), min(T, T - n_t))
    dst_t = slice(max(0, n_t), min(T, T + n_t))
    src_x = slice(max(0, -n_x), min(X, X - n_x))
    dst_x = slice(max(0, n_x), min(X, X + n_x))
    out[dst_t, dst_x] = a[src_t, src_x]
    return out


def translate(state: GridState, alpha: float) -> GridState:
    """Shift the state by ``alpha`` along the light line: psi(t, x) -> psi(t - alpha, x - alpha)."""
    n_t = state.t_grid.steps(alpha)
    n_x = state.x_grid.steps(alpha)
    if n_t == 0 and n_x == 0:
        return state._evolve(state.amp1.copy(), state.amp2.copy())
    amp1 = _shift(state.amp1, n_t, n_x)
    amp2 = _shift(state.amp2, n_t, n_x)
    before = state.channel_mass(0) + state.channel_mass(1)
    moved = state._evolve(amp1, amp2)
    after = moved.channel_mass(0) + moved.channel_mass(1)
    lost = before - after
    if before > 0 and lost > OVERFLOW_TOL * before:
        raise DomainOverflowError(
            f"translation by {alpha} pushes {lost / before:.3g} of the norm off the grid",
            lost_mass=lost / before,
        )
    return moved


def _apply_channel_matrix(state, mask, matrix):
    a1, a2 = state.amp1, state.amp2
    n1 = matrix[0, 0] * a1 + matrix[0, 1] * a2
    n2 = matrix[1, 0] * a1 + matrix[1, 1] * a2
    return state._evolve(np.where(mask, n1, a1), np.where(mask, n2, a2))


def apply_beamsplitter(state: GridState, region: SpacetimeRegion, which: Beamsplitter) -> GridState:
    """Mix channels on cells inside ``region``; leave all other cells untouched."""
    if region.is_empty:
        return state._evolve(state.amp1.copy(), state.amp2.copy())
    t = state.t_grid.points[:, None]
    x = state.x_grid.points[None, :]
    mask = np.broadcast_to(contains(region, t, x), state.amp1.shape)
    return _apply_channel_matrix(state, mask, bs_matrix(which))


def apply_mirrors(state: GridState, kappa1: float, kappa2: float) -> GridState:
    return state._evolve(state.amp1 * np.exp(1j * kappa1), state.amp2 * np.exp(1j * kappa2))


def normalize(state: GridState) -> GridState:
    n = state.norm()
    if n <= ZERO_NORM:
        raise AnnihilationError(f"state at {state.tau_label} has zero norm")
    return state._evolve(state.amp1 / n, state.amp2 / n)


def _step(state, log, label, description, op):
    new = op(state)
    pre = new.norm()
    new = normalize(new)
    new = new._evolve(new.amp1, new.amp2, label)
    log.record(label, description, pre, new.norm())
    return new


def run_pipeline(scenario: Scenario):
    """Evolve the scenario's photon from the source to the detectors.

    Returns the state at tau7 and the step log.
    """
    g = scenario.geometry
    temporal, spatial = build_profiles(scenario)
    log = StepLog()
    state = init_source(scenario.t_grid, scenario.x_grid, temporal, spatial)
    state = _step(state, log, "tau0", "source projection onto channel 1", lambda s: s)
    steps = [
        ("tau1", f"translate by {g.alpha1:g}", lambda s: translate(s, g.alpha1)),
        ("tau2", "beamsplitter BS1", lambda s: apply_beamsplitter(s, scenario.bs1, Beamsplitter.BS1)),
        ("tau3", f"translate by {g.alpha3 - g.alpha1:g}", lambda s: translate(s, g.alpha3 - g.alpha1)),
        ("tau4", "mirrors", lambda s: apply_mirrors(s, scenario.kappa1, scenario.kappa2)),
        ("tau5", f"translate by {g.alpha5 - g.alpha3:g}", lambda s: translate(s, g.alpha5 - g.alpha3)),
        ("tau6", "beamsplitter BS2", lambda s: apply_beamsplitter(s, scenario.bs2, Beamsplitter.BS2)),
        ("tau7", f"translate by {g.alpha7 - g.alpha5:g}", lambda s: translate(s, g.alpha7 - g.alpha5)),
    ]
    for label, description, op in steps:
        state = _step(state, log, label, description, op)
    return state, log


def state_probabilities(state: GridState, detector: Detector, t_lo, t_hi, x_lo=None, x_hi=None):
    """Detection probabilities read off a final state for windows ``[t_lo[i], t_hi[i]]``.

    Uses the same interpolant quadrature as the closed form, so the two
    agree to the accuracy of the nodal densities.
    """
    x_lo = state.x_grid.min if x_lo is None else x_lo
    x_hi = state.x_grid.max if x_hi is None else x_hi
    marginal = state.density(Detector(detector).channel) @ window_weights(state.x_grid, x_lo, x_hi)
    t_lo = np.atleast_1d(np.asarray(t_lo, dtype=float))
    t_hi = np.atleast_1d(np.asarray(t_hi, dtype=float))
    return np.array([window_weights(state.t_grid, a, b) @ marginal for a, b in zip(t_lo, t_hi)])


def dump_state(state: GridState, path, binary: bool = False) -> None:
    """Write ``t, x, Re amp1, Im amp1, Re amp2, Im amp2`` per cell, row-major in t.

    Text output is whitespace separated with a ``#`` header line; binary
    output is a ``.npy`` array of shape ``(cells, 6)``.
    """
    T, X = np.meshgrid(state.t_grid.points, state.x_grid.points, indexing="ij")
    table = np.column_stack(
        [
            T.ravel(),
            X.ravel(),
            state.amp1.real.ravel(),
            state.amp1.imag.ravel(),
            state.amp2.real.ravel(),
            state.amp2.imag.ravel(),
        ]
    )
    if binary:
        np.save(path, table)
    else:
        np.savetxt(path, table, fmt="%.17g", header="t x re_amp1 im_amp1 re_amp2 im_amp2")
