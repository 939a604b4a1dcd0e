"""Spacetime presence regions of the beamsplitters.

A region is a union of closed axis-aligned rectangles in the (t, x) plane.
Membership is vectorised over numpy arrays.  Boundaries are inclusive with a
slack of :data:`BOUNDARY_TOL` so that grid nodes computed along different
arithmetic paths (e.g. ``t - 15`` versus ``t_min + (i - 750) h``) classify
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

BOUNDARY_TOL = 1e-9
INF = math.inf


@dataclass(frozen=True)
class Rect:
    t_lo: float = -INF
    t_hi: float = INF
    x_lo: float = -INF
    x_hi: float = INF

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise ValueError(f"empty time interval [{self.t_lo}, {self.t_hi}]")
        if not self.x_lo < self.x_hi:
            raise ValueError(f"empty space interval [{self.x_lo}, {self.x_hi}]")

    @property
    def full_extent_x(self) -> bool:
        return self.x_lo == -INF and self.x_hi == INF

    def contains(self, t, x):
        tol = BOUNDARY_TOL
        return (
            (t >= self.t_lo - tol)
            & (t <= self.t_hi + tol)
            & (x >= self.x_lo - tol)
            & (x <= self.x_hi + tol)
        )

    def shifted(self, delta: float) -> "Rect":
        return Rect(self.t_lo + delta, self.t_hi + delta, self.x_lo + delta, self.x_hi + delta)


@dataclass(frozen=True)
class SpacetimeRegion:
    rects: tuple = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))

    @classmethod
    def always(cls, label=""):
        return cls((Rect(),), label)

    @classmethod
    def never(cls, label=""):
        return cls((), label)

    @classmethod
    def time_windows(cls, windows, label="", x_extent=(-INF, INF)):
        return cls(tuple(Rect(lo, hi, *x_extent) for lo, hi in windows), label)

    @property
    def is_empty(self) -> bool:
        return not self.rects

    @property
    def time_only(self) -> bool:
        """True when membership does not depend on x."""
        return all(r.full_extent_x for r in self.rects)


def contains(region: SpacetimeRegion, t, x):
    """Whether (t, x) lies in any rectangle of the region."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    result = np.zeros(np.broadcast_shapes(t.shape, x.shape), dtype=bool)
    for rect in region.rects:
        result |= rect.contains(t, x)
    return result if result.ndim else bool(result)


def shifted_contains(region: SpacetimeRegion, t, x, shift: float):
    """Membership of the point moved back along the light line: (t - shift, x - shift)."""
    return contains(region, np.asarray(t, dtype=float) - shift, np.asarray(x, dtype=float) - shift)


def shift_region(region: SpacetimeRegion, delta: float) -> SpacetimeRegion:
    """Translate every rectangle by ``delta`` along the diagonal t = x."""
    return SpacetimeRegion(tuple(r.shifted(delta) for r in region.rects), region.label)


def _parse_pair(text, line=None):
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"expected 'lo:hi', got {text!r}", line)
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"non-numeric interval {text!r}", line) from None
    if not lo < hi:
        raise ConfigError(f"interval {text!r} has lo >= hi", line)
    return lo, hi


def parse_windows(text: str, extent_x: str | None = None, label: str = "", line=None):
    """Parse ``present_t`` syntax: ``always``, ``never`` or ``lo:hi, lo:hi, ...``."""
    x_extent = (-INF, INF)
    if extent_x is not None and extent_x.strip().lower() not in ("", "all"):
        x_extent = _parse_pair(extent_x.strip(), line)
    text = text.strip().lower()
    if text == "never":
        return SpacetimeRegion.never(label)
    if text == "always":
        windows = [(-INF, INF)]
    else:
        windows = [_parse_pair(chunk.strip(), line) for chunk in text.split(",") if chunk.strip()]
        if not windows:
            raise ConfigError("empty presence window list (use 'never')", line)
    return SpacetimeRegion.time_windows(windows, label, x_extent)


def render_windows(region: SpacetimeRegion) -> tuple[str, str]:
    """Inverse of :func:`parse_windows`; returns ``(present_t, extent_x)``."""
    if region.is_empty:
        return "never", "all"
    extents = {(r.x_lo, r.x_hi) for r in region.rects}
    if len(extents) != 1:
        raise ValueError("regions with mixed spatial extents have no config form")
    (x_lo, x_hi), = extents
    extent = "all" if (x_lo, x_hi) == (-INF, INF) else f"{x_lo!r}:{x_hi!r}"
    if len(region.rects) == 1 and (region.rects[0].t_lo, region.rects[0].t_hi) == (-INF, INF):
        return "always", extent
    return ", ".join(f"{r.t_lo!r}:{r.t_hi!r}" for r in region.rects), extent


def _midpoints(edges):
    # A representative interior point of each cell, also for unbounded cells.
    lo, hi = edges[:-1], edges[1:]
    with np.errstate(invalid="ignore"):
        mid = 0.5 * (lo + hi)
    mid = np.where(np.isinf(lo) & np.isfinite(hi), hi - 1.0, mid)
    mid = np.where(np.isfinite(lo) & np.isinf(hi), lo + 1.0, mid)
    return np.where(np.isinf(lo) & np.isinf(hi), 0.0, mid)


def cell_partition(regions, t_range, x_range):
    """Cut a box at every rectangle edge of the given regions.

    Returns ``(t_edges, x_edges, members)`` where ``members[k]`` is a boolean
    array ``[n_t_cells, n_x_cells]`` telling whether each cell lies in
    ``regions[k]``.  Membership is constant inside each cell, so integrals of
    gated quantities reduce to sums over cells.
    """
    t_lo, t_hi = t_range
    x_lo, x_hi = x_range
    t_cuts, x_cuts = {t_lo, t_hi}, {x_lo, x_hi}
    for region in regions:
        for r in region.rects:
            t_cuts.update(v for v in (r.t_lo, r.t_hi) if t_lo < v < t_hi)
            x_cuts.update(v for v in (r.x_lo, r.x_hi) if x_lo < v < x_hi)
    t_edges = np.array(sorted(t_cuts))
    x_edges = np.array(sorted(x_cuts))
    t_mid, x_mid = _midpoints(t_edges), _midpoints(x_edges)
    members = [
        np.broadcast_to(contains(region, t_mid[:, None], x_mid[None, :]), (t_mid.size, x_mid.size))
        for region in regions
    ]
    return t_edges, x_edges, members
