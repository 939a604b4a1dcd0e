"""Experiment descriptions: data model, presets, config files and validation.

The config format is line-based::

    [photon]
    temporal = gaussian        # box | gaussian | exp_forward | exp_backward | spectrum:<path>
    omega_t = 1.0
    [bs2]
    present_t = 18:21          # always | never | lo:hi, lo:hi, ...
    [mirrors]
    kappa1 = pi                # radians; numbers or multiples of pi

Keys left out take the values of the ``scenario1`` preset's photon, geometry,
mirrors, detector and grid; both beamsplitters default to ``never``.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import ConfigError, SnappingError
from .grid import AxisGrid, CumulativeIntegral
from .profiles import (
    Direction,
    SINC_TAIL_TOL,
    load_spectrum,
    make_box_spatial,
    make_box_temporal,
    make_exp_tail_temporal,
    make_gaussian_temporal,
    make_sinc_spatial,
    synthesize_from_spectrum,
)
from .regions import SpacetimeRegion, cell_partition, parse_windows, render_windows, shift_region

TEMPORAL_KINDS = ("box", "gaussian", "exp_forward", "exp_backward", "spectrum")
SPATIAL_KINDS = ("box", "sinc")

#: Mixed mass below which a presence window counts as never touching the photon.
DEAD_WINDOW_MASS = 1e-12
#: Tail mass beyond which validate() warns.
TAIL_WARN_MASS = 1e-6

DEFAULT_T_GRID = AxisGrid(-10.0, 30.0, 0.02)
DEFAULT_X_GRID = AxisGrid(-10.0, 30.0, 0.02)


@dataclass(frozen=True)
class Geometry:
    """Positions along the optical path; shifts are measured from the source."""

    x_source: float = 0.0
    x_bs1: float = 5.0
    x_mirrors: float = 10.0
    x_bs2: float = 15.0
    x_detectors: float = 20.0

    @property
    def alpha1(self):
        return self.x_bs1 - self.x_source

    @property
    def alpha3(self):
        return self.x_mirrors - self.x_source

    @property
    def alpha5(self):
        return self.x_bs2 - self.x_source

    @property
    def alpha7(self):
        return self.x_detectors - self.x_source


@dataclass(frozen=True)
class Photon:
    temporal: str = "gaussian"
    omega_t: float = 1.0
    delta_t: float = 2.0
    spatial: str = "box"
    omega_x: float = 2.0
    delta_x: float = 2.0
    t0: float = 0.0
    x0: float = 0.0
    spectrum_path: str | None = None
    tail_tol: float = SINC_TAIL_TOL


@dataclass(frozen=True)
class DetectorSpec:
    """Detection windows; ``eps_x=None`` is the whole x axis, ``tbar=None`` tiles the t grid."""

    eps_t: float = 0.1
    eps_x: float | None = None
    tbar: tuple | None = None

    def tbar_values(self, t_grid: AxisGrid):
        if self.tbar is None:
            lo = t_grid.min + 0.5 * self.eps_t
            hi = t_grid.max - 0.5 * self.eps_t
            n = int(math.floor((hi - lo) / self.eps_t + 1e-9)) + 1
            return lo + self.eps_t * np.arange(n)
        lo, hi, step = self.tbar
        n = int(round((hi - lo) / step)) + 1
        return lo + step * np.arange(n)


@dataclass(frozen=True)
class Scenario:
    photon: Photon = Photon()
    geometry: Geometry = Geometry()
    bs1: SpacetimeRegion = SpacetimeRegion.never("BS1")
    bs2: SpacetimeRegion = SpacetimeRegion.never("BS2")
    kappa1: float = math.pi
    kappa2: float = math.pi
    detector: DetectorSpec = DetectorSpec()
    t_grid: AxisGrid = DEFAULT_T_GRID
    x_grid: AxisGrid = DEFAULT_X_GRID
    name: str = field(default="custom", compare=False)

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    @property
    def time_only(self) -> bool:
        return self.bs1.time_only and self.bs2.time_only

    def source_grids(self):
        """Grids on which the emitted profiles live.

        The top ``alpha7`` of each axis is left empty so that the photon
        never leaves the grid on its way to the detectors.
        """
        a7 = self.geometry.alpha7
        return (
            AxisGrid(self.t_grid.min, self.t_grid.max - a7, self.t_grid.h),
            AxisGrid(self.x_grid.min, self.x_grid.max - a7, self.x_grid.h),
        )


PRESETS = (
    "baseline-none",
    "baseline-bs1-only",
    "baseline-bs2-only",
    "baseline-both",
    "scenario1",
    "scenario2-forward",
    "scenario2-backward",
    "scenario2-gaussian",
    "scenario3",
)


def preset(name: str) -> Scenario:
    """Named experiment from the delayed-choice discussion.

    ``scenario2-backward`` keeps only the second beamsplitter's window: with
    the first window present the backward tail would be split at BS1 and
    reach D2 with probability one half of its overlap there.
    """
    always1, always2 = SpacetimeRegion.always("BS1"), SpacetimeRegion.always("BS2")
    never1, never2 = SpacetimeRegion.never("BS1"), SpacetimeRegion.never("BS2")
    s2_bs1 = SpacetimeRegion.time_windows([(1.5, 4.5)], "BS1")
    s2_bs2 = SpacetimeRegion.time_windows([(16.5, 19.5)], "BS2")
    base = Scenario(name=name)
    table = {
        "baseline-none": dict(bs1=never1, bs2=never2),
        "baseline-bs1-only": dict(bs1=always1, bs2=never2),
        "baseline-bs2-only": dict(bs1=never1, bs2=always2),
        "baseline-both": dict(bs1=always1, bs2=always2),
        "scenario1": dict(bs1=never1, bs2=SpacetimeRegion.time_windows([(18.0, 21.0)], "BS2")),
        "scenario2-forward": dict(
            photon=Photon(temporal="exp_forward"),
            bs1=s2_bs1,
            bs2=s2_bs2,
            t_grid=AxisGrid(-2.0, 54.0, 0.02),
        ),
        "scenario2-backward": dict(
            photon=Photon(temporal="exp_backward"),
            bs1=never1,
            bs2=s2_bs2,
            t_grid=AxisGrid(-34.0, 22.0, 0.02),
        ),
        "scenario2-gaussian": dict(bs1=s2_bs1, bs2=s2_bs2),
        "scenario3": dict(
            bs1=SpacetimeRegion.time_windows([(6.5, 7.5)], "BS1"),
            bs2=SpacetimeRegion.time_windows([(6.5, 9.5)], "BS2"),
        ),
    }
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return base.with_(**table[name])


@lru_cache(maxsize=64)
def build_profiles(scenario: Scenario):
    """Emitted temporal and spatial profiles, centred at ``(t0, x0)``."""
    p = scenario.photon
    t_src, x_src = scenario.source_grids()
    if p.temporal == "box":
        temporal = make_box_temporal(t_src, p.t0, p.delta_t)
    elif p.temporal == "gaussian":
        temporal = make_gaussian_temporal(t_src, p.t0, p.omega_t)
    elif p.temporal in ("exp_forward", "exp_backward"):
        direction = Direction(p.temporal.split("_", 1)[1])
        temporal = make_exp_tail_temporal(t_src, p.t0, p.omega_t, direction)
    elif p.temporal == "spectrum":
        temporal = synthesize_from_spectrum(t_src, load_spectrum(p.spectrum_path), p.t0)
    else:
        raise ConfigError(f"unknown temporal profile {p.temporal!r}")
    if p.spatial == "box":
        spatial = make_box_spatial(x_src, p.x0, p.delta_x)
    elif p.spatial == "sinc":
        spatial = make_sinc_spatial(x_src, p.x0, p.omega_x, p.tail_tol)
    else:
        raise ConfigError(f"unknown spatial profile {p.spatial!r}")
    return temporal, spatial


def check(scenario: Scenario) -> Scenario:
    """Raise on violated invariants; return the scenario unchanged otherwise."""
    g = scenario.geometry
    order = [g.x_source, g.x_bs1, g.x_mirrors, g.x_bs2, g.x_detectors]
    if any(b <= a for a, b in zip(order, order[1:])):
        raise ConfigError(
            "geometry must satisfy x_source < x_bs1 < x_mirrors < x_bs2 < x_detectors"
        )
    for grid, axis in ((scenario.t_grid, "t"), (scenario.x_grid, "x")):
        for alpha in (g.alpha1, g.alpha3, g.alpha5, g.alpha7):
            try:
                grid.steps(alpha)
            except SnappingError as exc:
                raise ConfigError(f"{axis} grid: {exc}") from None
        if g.alpha7 >= grid.max - grid.min:
            raise ConfigError(f"{axis} grid is shorter than the source-detector distance")
    p = scenario.photon
    if p.temporal not in TEMPORAL_KINDS:
        raise ConfigError(f"unknown temporal profile {p.temporal!r}")
    if p.temporal == "spectrum" and not p.spectrum_path:
        raise ConfigError("spectrum profile needs a file path")
    if p.spatial not in SPATIAL_KINDS:
        raise ConfigError(f"unknown spatial profile {p.spatial!r}")
    d = scenario.detector
    if not d.eps_t > 0 or (d.eps_x is not None and not d.eps_x > 0):
        raise ConfigError("detector windows must have positive width")
    if d.tbar is not None:
        lo, hi, step = d.tbar
        if not step > 0 or hi < lo:
            raise ConfigError("tbar must be min:max:step with step > 0 and max >= min")
    build_profiles(scenario)
    return scenario


def mixed_mass(scenario: Scenario, region: SpacetimeRegion, alpha: float) -> float:
    """Probability mass of the photon, shifted by ``alpha``, inside ``region``."""
    temporal, spatial = build_profiles(scenario)
    ft = CumulativeIntegral(temporal.grid, abs(temporal.samples) ** 2)
    fx = CumulativeIntegral(spatial.grid, abs(spatial.samples) ** 2)
    tg, xg = temporal.grid, spatial.grid
    t_edges, x_edges, (inside,) = cell_partition(
        [shift_region(region, -alpha)], (tg.min, tg.max), (xg.min, xg.max)
    )
    q_t = ft.between(t_edges[:-1], t_edges[1:])
    q_x = fx.between(x_edges[:-1], x_edges[1:])
    return float(q_t @ np.where(inside, 1.0, 0.0) @ q_x)


def validate(scenario: Scenario) -> list[str]:
    """Warnings about a structurally valid scenario (tails, dead windows, clipped windows)."""
    check(scenario)
    warnings_ = []
    temporal, spatial = build_profiles(scenario)
    for prof, axis in ((temporal, "temporal"), (spatial, "spatial")):
        if prof.truncated_mass > TAIL_WARN_MASS:
            warnings_.append(
                f"{axis} profile loses {prof.truncated_mass:.3g} of its mass outside the grid"
            )
    g = scenario.geometry
    for region, alpha, label in ((scenario.bs1, g.alpha1, "BS1"), (scenario.bs2, g.alpha5, "BS2")):
        if region.is_empty:
            continue
        if mixed_mass(scenario, region, alpha) <= DEAD_WINDOW_MASS:
            warnings_.append(f"{label} presence window never overlaps the photon (dead window)")
    d = scenario.detector
    tbars = d.tbar_values(scenario.t_grid)
    if not scenario.t_grid.covers(tbars.min() - 0.5 * d.eps_t, tbars.max() + 0.5 * d.eps_t):
        warnings_.append("detector time windows are clipped by the t grid")
    if d.eps_x is not None:
        x_bar = scenario.photon.x0 + g.alpha7
        if not scenario.x_grid.covers(x_bar - 0.5 * d.eps_x, x_bar + 0.5 * d.eps_x):
            warnings_.append("detector space window is clipped by the x grid")
    return warnings_


# --- config text -----------------------------------------------------------

_SECTIONS = {
    "photon": ("temporal", "omega_t", "delta_t", "omega_x", "delta_x", "spatial", "t0", "x0", "tail_tol"),
    "geometry": ("x_source", "x_bs1", "x_mirrors", "x_bs2", "x_detectors"),
    "bs1": ("present_t", "extent_x"),
    "bs2": ("present_t", "extent_x"),
    "mirrors": ("kappa1", "kappa2"),
    "detector": ("eps_t", "eps_x", "tbar"),
    "grid": ("t", "x"),
}

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+\.?\d*))?$")


def _parse_float(text, key, line):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line) from None


def parse_angle(text, key="angle", line=None):
    """Radians as a plain number or a multiple of pi (`pi`, `pi/2`, `0.5*pi`)."""
    t = text.strip().lower()
    if t.endswith("deg") or "°" in t or t.endswith("degrees"):
        raise ConfigError(f"{key}: angles are in radians, degrees are not accepted", line)
    m = _PI_RE.match(t)
    if m:
        coef = m.group(1)
        value = math.pi * (float(coef) if coef not in ("", "+", "-") else float(coef + "1"))
        return value / float(m.group(2)) if m.group(2) else value
    return _parse_float(t, key, line)


def _parse_triple(text, key, line):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected min:max:step, got {text!r}", line)
    return tuple(_parse_float(p, key, line) for p in parts)


def parse_config(text: str, base_dir: str | None = None) -> Scenario:
    """Parse config text into a checked :class:`Scenario`."""
    values: dict[tuple[str, str], tuple[str, int]] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _SECTIONS[section]:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
        if (section, key) in values:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        values[(section, key)] = (value, lineno)

    def get(section, key):
        return values.get((section, key), (None, None))

    base = preset("scenario1")
    photon_kw = {}
    for key in ("omega_t", "delta_t", "omega_x", "delta_x", "t0", "x0", "tail_tol"):
        v, ln = get("photon", key)
        if v is not None:
            photon_kw[key] = _parse_float(v, key, ln)
    v, ln = get("photon", "temporal")
    if v is not None:
        if v.startswith("spectrum:"):
            path = v.split(":", 1)[1].strip()
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            photon_kw.update(temporal="spectrum", spectrum_path=path)
        elif v in TEMPORAL_KINDS and v != "spectrum":
            photon_kw["temporal"] = v
        else:
            raise ConfigError(f"unknown temporal profile {v!r}", ln)
    v, ln = get("photon", "spatial")
    if v is not None:
        if v not in SPATIAL_KINDS:
            raise ConfigError(f"unknown spatial profile {v!r}", ln)
        photon_kw["spatial"] = v

    geometry_kw = {}
    for key in _SECTIONS["geometry"]:
        v, ln = get("geometry", key)
        if v is not None:
            geometry_kw[key] = _parse_float(v, key, ln)

    regions = {}
    for name in ("bs1", "bs2"):
        present, ln = get(name, "present_t")
        extent, ln_x = get(name, "extent_x")
        if present is None and extent is not None:
            raise ConfigError(f"[{name}] extent_x given without present_t", ln_x)
        regions[name] = parse_windows(present or "never", extent, name.upper(), ln or ln_x)

    kappas = {}
    for key in ("kappa1", "kappa2"):
        v, ln = get("mirrors", key)
        kappas[key] = base.kappa1 if v is None else parse_angle(v, key, ln)

    det_kw = {}
    v, ln = get("detector", "eps_t")
    if v is not None:
        det_kw["eps_t"] = _parse_float(v, "eps_t", ln)
    v, ln = get("detector", "eps_x")
    if v is not None:
        det_kw["eps_x"] = None if v.lower() == "full" else _parse_float(v, "eps_x", ln)
    v, ln = get("detector", "tbar")
    if v is not None:
        det_kw["tbar"] = None if v.lower() == "auto" else _parse_triple(v, "tbar", ln)

    grids = {}
    for key in ("t", "x"):
        v, ln = get("grid", key)
        if v is not None:
            try:
                grids[f"{key}_grid"] = AxisGrid(*_parse_triple(v, key, ln))
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"grid {key}: {exc}", ln) from None

    scenario = base.with_(
        photon=replace(base.photon, **photon_kw),
        geometry=replace(base.geometry, **geometry_kw),
        bs1=regions["bs1"],
        bs2=regions["bs2"],
        detector=replace(base.detector, **det_kw),
        name="config",
        **kappas,
        **grids,
    )
    return check(scenario)


def load_config(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path))).with_(
        name=os.path.splitext(os.path.basename(path))[0]
    )


def render(scenario: Scenario) -> str:
    """Canonical config text; ``parse_config(render(s)) == s``."""
    p, g, d = scenario.photon, scenario.geometry, scenario.detector
    temporal = f"spectrum:{p.spectrum_path}" if p.temporal == "spectrum" else p.temporal
    lines = [
        "[photon]",
        f"temporal = {temporal}",
        f"omega_t = {p.omega_t!r}",
        f"delta_t = {p.delta_t!r}",
        f"spatial = {p.spatial}",
        f"omega_x = {p.omega_x!r}",
        f"delta_x = {p.delta_x!r}",
        f"t0 = {p.t0!r}",
        f"x0 = {p.x0!r}",
        f"tail_tol = {p.tail_tol!r}",
        "",
        "[geometry]",
    ]
    lines += [f"{key} = {getattr(g, key)!r}" for key in _SECTIONS["geometry"]]
    for name, region in (("bs1", scenario.bs1), ("bs2", scenario.bs2)):
        present, extent = render_windows(region)
        lines += ["", f"[{name}]", f"present_t = {present}", f"extent_x = {extent}"]
    lines += [
        "",
        "[mirrors]",
        f"kappa1 = {scenario.kappa1!r}",
        f"kappa2 = {scenario.kappa2!r}",
        "",
        "[detector]",
        f"eps_t = {d.eps_t!r}",
        f"eps_x = {'full' if d.eps_x is None else repr(d.eps_x)}",
        "tbar = auto" if d.tbar is None else "tbar = " + ":".join(repr(v) for v in d.tbar),
        "",
        "[grid]",
        f"t = {scenario.t_grid.render()}",
        f"x = {scenario.x_grid.render()}",
        "",
    ]
    return "\n".join(lines)
