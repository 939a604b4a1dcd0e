"""Direct evaluation of the final detector densities and probabilities.

At the detectors every spacetime point falls in one of four branches,
depending on whether the point, traced back along the light line, was inside
the first and/or second beamsplitter's presence region.  The density there
is the translated source density times the branch weight.

Probabilities integrate a monotone cubic interpolant of the nodal
source density, multiplied by the exact (piecewise constant) branch weight.
Three quadrature paths are available:

``separable``
    branch weights depend on t only; one 1-D integral per branch interval
    times the spatial window integral.
``partition``
    general rectangular regions; the window is cut at every region edge
    and each cell contributes a product of 1-D integrals.
``grid``
    brute-force 2-D sum over nodes with the branch weight sampled at the
    nodes (gating edges are resolved only to one cell).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .grid import SNAP_TOL, AxisGrid, CumulativeIntegral, window_weights
from .optics import Detector, amplitude_table, coefficient_table
from .regions import cell_partition, shift_region, shifted_contains
from .scenarios import Scenario, build_profiles


@dataclass(frozen=True)
class DetectorWindow:
    """Detection interval ``t_bar +- eps_t/2`` by ``x_bar +- eps_x/2``; ``eps_x=None`` spans the x grid."""

    t_bar: float
    x_bar: float
    eps_t: float
    eps_x: float | None = None

    def __post_init__(self):
        if not self.eps_t > 0 or (self.eps_x is not None and not self.eps_x > 0):
            raise ValueError("detector window widths must be positive")

    @classmethod
    def full(cls, scenario: Scenario) -> "DetectorWindow":
        """Window covering the whole grid."""
        g = scenario.t_grid
        return cls(0.5 * (g.min + g.max), detector_position(scenario), g.max - g.min, None)

    def t_range(self):
        return self.t_bar - 0.5 * self.eps_t, self.t_bar + 0.5 * self.eps_t

    def x_range(self, x_grid: AxisGrid):
        if self.eps_x is None:
            return x_grid.min, x_grid.max
        return self.x_bar - 0.5 * self.eps_x, self.x_bar + 0.5 * self.eps_x


@dataclass(frozen=True, eq=False)
class DetectionCurve:
    detector: Detector
    t_bar: np.ndarray
    probability: np.ndarray
    eps_t: float
    eps_x: float | None

    @property
    def points(self):
        return list(zip(self.t_bar.tolist(), self.probability.tolist()))

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probability)


def detector_position(scenario: Scenario) -> float:
    return scenario.photon.x0 + scenario.geometry.alpha7


@dataclass(frozen=True, eq=False)
class FinalState:
    """Ingredients of the density at the detectors, prepared once per scenario."""

    scenario: Scenario
    rho_t: CumulativeIntegral
    rho_x: CumulativeIntegral
    bs1: object
    bs2: object


@lru_cache(maxsize=32)
def final_state(scenario: Scenario) -> FinalState:
    temporal, spatial = build_profiles(scenario)
    g = scenario.geometry
    a7 = g.alpha7
    rho_t = np.abs(temporal(scenario.t_grid.points - a7)) ** 2
    rho_x = np.abs(spatial(scenario.x_grid.points - a7)) ** 2
    return FinalState(
        scenario,
        CumulativeIntegral(scenario.t_grid, rho_t),
        CumulativeIntegral(scenario.x_grid, rho_x),
        shift_region(scenario.bs1, a7 - g.alpha1),
        shift_region(scenario.bs2, a7 - g.alpha5),
    )


def _check_points(scenario, t, x):
    slack = SNAP_TOL * max(scenario.t_grid.h, scenario.x_grid.h)
    tg, xg = scenario.t_grid, scenario.x_grid
    if (
        np.any(t < tg.min - slack)
        or np.any(t > tg.max + slack)
        or np.any(x < xg.min - slack)
        or np.any(x > xg.max + slack)
    ):
        raise DomainError("evaluation point outside the grid")


def branch_keys(scenario: Scenario, t, x):
    """Boolean arrays (in_bs1, in_bs2) for points at the detectors."""
    g = scenario.geometry
    a7 = g.alpha7
    return (
        np.asarray(shifted_contains(scenario.bs1, t, x, a7 - g.alpha1)),
        np.asarray(shifted_contains(scenario.bs2, t, x, a7 - g.alpha5)),
    )


def final_density(scenario: Scenario, detector: Detector, t, x):
    """Probability density of finding the photon at (t, x) in detector ``detector``."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_points(scenario, t, x)
    temporal, spatial = build_profiles(scenario)
    a7 = scenario.geometry.alpha7
    rho = np.abs(temporal(t - a7)) ** 2 * np.abs(spatial(x - a7)) ** 2
    in1, in2 = branch_keys(scenario, t, x)
    table = coefficient_table(detector, scenario.kappa1, scenario.kappa2)
    return rho * table[in1.astype(int), in2.astype(int)]


def final_amplitude(scenario: Scenario, detector: Detector, t, x):
    """Complex amplitude of channel ``detector`` at (t, x), phases included."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    _check_points(scenario, t, x)
    temporal, spatial = build_profiles(scenario)
    a7 = scenario.geometry.alpha7
    gamma = temporal(t - a7) * spatial(x - a7)
    in1, in2 = branch_keys(scenario, t, x)
    table = amplitude_table(scenario.kappa1, scenario.kappa2)
    return gamma * table[in1.astype(int), in2.astype(int), Detector(detector).channel]


def density_on_grid(scenario: Scenario, detector: Detector) -> np.ndarray:
    """Final density at every grid node, shape ``(n_t, n_x)``."""
    t = scenario.t_grid.points[:, None]
    x = scenario.x_grid.points[None, :]
    return final_density(scenario, detector, t, x)


def _separable(fs, table, t_lo, t_hi, x_lo, x_hi):
    s = fs.scenario
    tg, xg = s.t_grid, s.x_grid
    edges, _, (m1, m2) = cell_partition([fs.bs1, fs.bs2], (tg.min, tg.max), (xg.min, xg.max))
    coef = table[m1[:, 0].astype(int), m2[:, 0].astype(int)]
    lo = np.clip(np.asarray(t_lo)[..., None], edges[:-1], edges[1:])
    hi = np.clip(np.asarray(t_hi)[..., None], edges[:-1], edges[1:])
    temporal = (fs.rho_t.between(lo, hi) * coef).sum(axis=-1)
    return temporal * float(fs.rho_x.between(x_lo, x_hi))


def _partition(fs, table, t_lo, t_hi, x_lo, x_hi):
    t_edges, x_edges, (m1, m2) = cell_partition([fs.bs1, fs.bs2], (t_lo, t_hi), (x_lo, x_hi))
    coef = table[m1.astype(int), m2.astype(int)]
    q_t = fs.rho_t.between(t_edges[:-1], t_edges[1:])
    q_x = fs.rho_x.between(x_edges[:-1], x_edges[1:])
    return float(q_t @ coef @ q_x)


def _grid(fs, detector, t_lo, t_hi, x_lo, x_hi):
    s = fs.scenario
    w_t = window_weights(s.t_grid, t_lo, t_hi)
    w_x = window_weights(s.x_grid, x_lo, x_hi)
    return float(w_t @ density_on_grid(s, detector) @ w_x)


def _resolve_method(scenario, method):
    if method == "auto":
        return "separable" if scenario.time_only else "partition"
    if method == "separable" and not scenario.time_only:
        raise ValueError("separable quadrature needs regions with full spatial extent")
    if method not in ("separable", "partition", "grid"):
        raise ValueError(f"unknown quadrature method {method!r}")
    return method


def detection_probability(
    scenario: Scenario, detector: Detector, window: DetectorWindow, method: str = "auto"
) -> float:
    """Probability that detector ``detector`` fires inside ``window``."""
    t_lo, t_hi = window.t_range()
    x_lo, x_hi = window.x_range(scenario.x_grid)
    if not (scenario.t_grid.covers(t_lo, t_hi) and scenario.x_grid.covers(x_lo, x_hi)):
        raise DomainError("detector window extends beyond the grid")
    t_lo, t_hi = max(t_lo, scenario.t_grid.min), min(t_hi, scenario.t_grid.max)
    x_lo, x_hi = max(x_lo, scenario.x_grid.min), min(x_hi, scenario.x_grid.max)
    method = _resolve_method(scenario, method)
    fs = final_state(scenario)
    table = coefficient_table(detector, scenario.kappa1, scenario.kappa2)
    if method == "separable":
        p = float(_separable(fs, table, t_lo, t_hi, x_lo, x_hi))
    elif method == "partition":
        p = _partition(fs, table, t_lo, t_hi, x_lo, x_hi)
    else:
        p = _grid(fs, Detector(detector), t_lo, t_hi, x_lo, x_hi)
    return max(0.0, p)


def detection_curve(
    scenario: Scenario,
    detector: Detector,
    t_bar_range=None,
    eps_t: float | None = None,
    eps_x: float | None = None,
    method: str = "auto",
) -> DetectionCurve:
    """Detection probability against window centre ``t_bar`` at the detector position.

    Defaults come from ``scenario.detector``; windows reaching past the grid
    are clipped to it.
    """
    spec = scenario.detector
    eps_t = spec.eps_t if eps_t is None else eps_t
    eps_x = spec.eps_x if eps_x is None else eps_x
    if t_bar_range is None:
        t_bars = replace(spec, eps_t=eps_t).tbar_values(scenario.t_grid)
    else:
        t_bars = replace(spec, tbar=tuple(t_bar_range)).tbar_values(scenario.t_grid)
    tg, xg = scenario.t_grid, scenario.x_grid
    t_lo = np.clip(t_bars - 0.5 * eps_t, tg.min, tg.max)
    t_hi = np.clip(t_bars + 0.5 * eps_t, tg.min, tg.max)
    x_bar = detector_position(scenario)
    if eps_x is None:
        x_lo, x_hi = xg.min, xg.max
    else:
        x_lo, x_hi = max(x_bar - 0.5 * eps_x, xg.min), min(x_bar + 0.5 * eps_x, xg.max)
    method = _resolve_method(scenario, method)
    fs = final_state(scenario)
    table = coefficient_table(detector, scenario.kappa1, scenario.kappa2)
    if method == "separable":
        probs = _separable(fs, table, t_lo, t_hi, x_lo, x_hi)
    elif method == "partition":
        probs = np.array([_partition(fs, table, a, b, x_lo, x_hi) for a, b in zip(t_lo, t_hi)])
    else:
        dens = density_on_grid(scenario, detector) @ window_weights(xg, x_lo, x_hi)
        probs = np.array([window_weights(tg, a, b) @ dens for a, b in zip(t_lo, t_hi)])
    probs = np.maximum(0.0, np.where(t_hi > t_lo, probs, 0.0))
    return DetectionCurve(Detector(detector), t_bars, probs, eps_t, eps_x)


def total_probabilities(scenario: Scenario, method: str = "auto"):
    """``(p_D1, p_D2)`` integrated over the whole grid."""
    window = DetectorWindow.full(scenario)
    return tuple(detection_probability(scenario, d, window, method) for d in Detector)
