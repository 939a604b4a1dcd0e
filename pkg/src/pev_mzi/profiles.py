"""Temporal and spatial amplitude profiles of the photon.

Every constructor samples an analytic shape on an :class:`AxisGrid` and
rescales it to unit L2 norm under the trapezoid rule.  The returned profile
is also callable, evaluating the same (rescaled) analytic shape at arbitrary
coordinates and returning zero outside the grid it was built on, so that
grid samples and point evaluations never disagree.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ResolutionError, TruncationError, TruncationWarning
from .grid import SNAP_TOL, AxisGrid, trapezoid

#: Default largest sinc tail mass a grid may cut off.
SINC_TAIL_TOL = 1e-3
#: Magnitude below which a profile counts as vanished at a grid edge.
EDGE_TOL = 1e-12
#: Spectral amplitudes below this fraction of the peak are ignored by the Nyquist check.
SPECTRUM_FLOOR = 1e-10


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True, eq=False)
class Profile:
    """Sampled complex amplitude along one axis.

    ``shape`` is the unnormalised analytic amplitude as a function of the
    offset from ``center``; ``scale`` is the factor that brings the sampled
    shape to unit norm.  Profiles built by hand (``shape=None``) are
    evaluated by linear interpolation of ``samples``.
    """

    grid: AxisGrid
    samples: np.ndarray
    center: float
    width_param: float
    kind: str = "custom"
    shape: Optional[Callable[[np.ndarray], np.ndarray]] = None
    scale: float = 1.0
    truncated_mass: float = 0.0

    def __call__(self, coord):
        coord = np.asarray(coord, dtype=float)
        if self.shape is None:
            pts = self.grid.points
            return np.interp(coord, pts, self.samples.real, 0.0, 0.0) + 1j * np.interp(
                coord, pts, self.samples.imag, 0.0, 0.0
            )
        slack = SNAP_TOL * self.grid.h
        inside = (coord >= self.grid.min - slack) & (coord <= self.grid.max + slack)
        values = self.scale * self.shape(coord - self.center)
        return np.where(inside, values, 0.0).astype(complex)

    def density(self, coord):
        return np.abs(self(coord)) ** 2


class TemporalProfile(Profile):
    """Amplitude along the time axis."""


class SpatialProfile(Profile):
    """Amplitude along the space axis."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Frequency profile ``a(omega)`` sampled on a uniform grid."""

    omega_grid: AxisGrid
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if samples.shape != (self.omega_grid.count,):
            raise ValueError("spectrum samples do not match the frequency grid")
        if not np.all(np.isfinite(samples)):
            raise ValueError("spectrum contains non-finite samples")
        if not np.any(samples != 0):
            raise ValueError("spectrum has zero norm")

    @property
    def bandwidth(self) -> float:
        """Largest |omega| carrying non-negligible amplitude."""
        mag = np.abs(self.samples)
        significant = mag > SPECTRUM_FLOOR * mag.max()
        return float(np.abs(self.omega_grid.points[significant]).max())


def l2_norm(profile: Profile) -> float:
    """Trapezoid-rule L2 norm of a profile's samples."""
    return float(np.sqrt(trapezoid(np.abs(profile.samples) ** 2, profile.grid.h)))


def _build(cls, grid, center, width_param, kind, shape, truncated_mass=0.0):
    raw = shape(grid.points - center).astype(complex)
    norm = math.sqrt(trapezoid(np.abs(raw) ** 2, grid.h))
    if norm == 0.0:
        raise DomainError(f"{kind} profile has no support on the grid")
    scale = 1.0 / norm
    samples = raw * scale
    if max(abs(samples[0]), abs(samples[-1])) > EDGE_TOL:
        warnings.warn(
            f"{kind} profile does not vanish at the grid edges "
            f"(|edge| = {max(abs(samples[0]), abs(samples[-1])):.3g})",
            TruncationWarning,
            stacklevel=3,
        )
    samples.setflags(write=False)
    return cls(
        grid=grid,
        samples=samples,
        center=float(center),
        width_param=float(width_param),
        kind=kind,
        shape=shape,
        scale=scale,
        truncated_mass=float(truncated_mass),
    )


def _box_shape(delta, h):
    # Half-open support [-delta/2, delta/2); nodes on the left edge are inside.
    slack = SNAP_TOL * h

    def shape(s):
        inside = (s >= -0.5 * delta - slack) & (s < 0.5 * delta - slack)
        return inside.astype(float)

    return shape


def _make_box(cls, grid, center, delta):
    if delta < 2 * grid.h * (1 - SNAP_TOL):
        raise ResolutionError(f"box width {delta} is narrower than two cells (h={grid.h})")
    if not grid.covers(center - 0.5 * delta, center + 0.5 * delta):
        raise DomainError(
            f"box support [{center - 0.5 * delta}, {center + 0.5 * delta}] "
            f"leaves grid [{grid.min}, {grid.max}]"
        )
    return _build(cls, grid, center, delta, "box", _box_shape(delta, grid.h))


def make_box_temporal(grid: AxisGrid, center: float, delta_t: float) -> TemporalProfile:
    """Flat amplitude on ``[center - delta_t/2, center + delta_t/2)``.

    With unit L2 norm the density inside is ``1/delta_t``.
    """
    return _make_box(TemporalProfile, grid, center, delta_t)


def make_box_spatial(grid: AxisGrid, center: float, delta_x: float) -> SpatialProfile:
    return _make_box(SpatialProfile, grid, center, delta_x)


def make_gaussian_temporal(grid: AxisGrid, center: float, omega_t: float) -> TemporalProfile:
    """Gaussian amplitude ``exp(-(t-center)^2 / (2 omega_t^2))``.

    The density has standard deviation ``omega_t / sqrt(2)``.  The grid must
    reach ``8 * omega_t`` past the center on both sides.
    """
    if not omega_t > 0:
        raise ValueError("omega_t must be positive")
    reach = 8.0 * omega_t
    if not grid.covers(center - reach, center + reach):
        raise TruncationError(
            f"gaussian with omega_t={omega_t} centred at {center} needs "
            f"[{center - reach}, {center + reach}], grid is [{grid.min}, {grid.max}]"
        )

    def shape(s):
        return np.exp(-(s**2) / (2.0 * omega_t**2))

    lost = 0.5 * (
        math.erfc((center - grid.min) / omega_t) + math.erfc((grid.max - center) / omega_t)
    )
    return _build(TemporalProfile, grid, center, omega_t, "gaussian", shape, lost)


def make_exp_tail_temporal(
    grid: AxisGrid, center: float, omega_t: float, direction: Direction
) -> TemporalProfile:
    """One-sided profile ``s * exp(-omega_t * s)`` with a tail in one time direction.

    ``FORWARD`` puts all support at ``t >= center`` (density peak at
    ``center + 1/omega_t``); ``BACKWARD`` is the mirror image.
    """
    if not omega_t > 0:
        raise ValueError("omega_t must be positive")
    direction = Direction(direction)
    sign = 1.0 if direction is Direction.FORWARD else -1.0
    reach = 20.0 / omega_t
    far = center + sign * reach
    if not grid.covers(min(center, far), max(center, far)):
        raise TruncationError(
            f"{direction.value} tail with omega_t={omega_t} centred at {center} "
            f"needs to reach {far}, grid is [{grid.min}, {grid.max}]"
        )

    def shape(s):
        u = sign * s
        return np.where(u > 0, u * np.exp(-omega_t * np.maximum(u, 0.0)), 0.0)

    room = (grid.max - center) if sign > 0 else (center - grid.min)
    y = 2.0 * omega_t * room
    lost = math.exp(-y) * (0.5 * y * y + y + 1.0)
    return _build(TemporalProfile, grid, center, omega_t, f"exp_{direction.value}", shape, lost)


def make_sinc_spatial(
    grid: AxisGrid, center: float, omega_x: float, tail_tol: float = SINC_TAIL_TOL
) -> SpatialProfile:
    """Lowest-order spherical-Bessel profile ``sqrt(omega_x/pi) sin(omega_x s)/(omega_x s)``.

    The sinc decays only as ``1/s``, so truncation is the dominant error.
    The mass cut off by the grid is measured, stored as ``truncated_mass``
    and must stay below ``tail_tol``.
    """
    if not omega_x > 0:
        raise ValueError("omega_x must be positive")
    if grid.h > math.pi / omega_x:
        raise ResolutionError(f"h={grid.h} undersamples a sinc with omega_x={omega_x}")
    if not grid.covers(center, center):
        raise DomainError(f"sinc center {center} outside grid")
    amp = math.sqrt(omega_x / math.pi)

    def shape(s):
        return amp * np.sinc(omega_x * s / math.pi)

    captured = trapezoid(shape(grid.points - center) ** 2, grid.h)
    deficit = max(0.0, 1.0 - float(captured))
    if deficit > tail_tol:
        raise TruncationError(
            f"grid [{grid.min}, {grid.max}] cuts off {deficit:.3g} of the sinc mass "
            f"(tolerance {tail_tol:g})",
            deficit=deficit,
        )
    return _build(SpatialProfile, grid, center, omega_x, "sinc", shape, deficit)


def synthesize_from_spectrum(grid: AxisGrid, spectrum: Spectrum, shift: float) -> TemporalProfile:
    """Temporal profile as the Fourier synthesis of a frequency profile.

    ``gamma(t) = (2 pi)^-1/2 * integral a(w) exp(i w (t - shift)) dw``, with the
    frequency integral done by the trapezoid rule on the spectrum's grid.
    """
    w_max = spectrum.bandwidth
    if w_max > 0 and grid.h > math.pi / w_max * (1 + SNAP_TOL):
        raise ResolutionError(
            f"h={grid.h} exceeds the Nyquist limit pi/{w_max:g} of the spectrum"
        )
    omega = spectrum.omega_grid.points
    weights = np.full(omega.size, spectrum.omega_grid.h)
    weights[[0, -1]] *= 0.5
    coeff = weights * spectrum.samples / math.sqrt(2.0 * math.pi)

    def shape(s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        out = np.empty(flat.size, dtype=complex)
        for start in range(0, flat.size, 4096):
            chunk = flat[start : start + 4096]
            out[start : start + 4096] = np.exp(1j * np.outer(chunk, omega)) @ coeff
        return out.reshape(s.shape)

    power = np.abs(spectrum.samples) ** 2
    mean = np.sum(power * omega) / power.sum()
    rms = math.sqrt(max(np.sum(power * (omega - mean) ** 2) / power.sum(), 0.0))
    width = 1.0 / rms if rms > 0 else math.inf
    return _build(TemporalProfile, grid, shift, width, "spectrum", shape)


def parse_spectrum(text: str) -> Spectrum:
    """Read ``omega  Re(a)  [Im(a)]`` rows; ``#`` starts a comment."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ValueError(f"spectrum line {lineno}: expected 2 or 3 columns")
        try:
            rows.append([float(f) for f in fields] + [0.0] * (3 - len(fields)))
        except ValueError as exc:
            raise ValueError(f"spectrum line {lineno}: {exc}") from None
    if len(rows) < 2:
        raise ValueError("spectrum needs at least two rows")
    data = np.array(rows)
    omega = data[:, 0]
    steps = np.diff(omega)
    if np.any(steps <= 0):
        raise ValueError("spectrum frequencies must be strictly increasing")
    h = (omega[-1] - omega[0]) / (omega.size - 1)
    if np.max(np.abs(steps - h)) > 1e-6 * h:
        raise ValueError("spectrum frequencies must be uniformly spaced")
    grid = AxisGrid(float(omega[0]), float(omega[-1]), float(h))
    return Spectrum(grid, data[:, 1] + 1j * data[:, 2])


def load_spectrum(path) -> Spectrum:
    with open(path, encoding="utf-8") as fh:
        return parse_spectrum(fh.read())
