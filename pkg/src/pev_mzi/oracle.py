"""Independent brute-force reference computations.

Nothing here reuses the main modules' numerics: profiles, gating and the
beamsplitter algebra are written out again with plain loops and explicit
2x2 products.  Tests compare the fast implementations against these, and
:func:`derived_values` freezes the reference numbers into a fixture file.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass

import numpy as np

ORACLE_H = 1e-4
MAX_DENSE_NODES = 200
_EDGE_TOL = 1e-9
_R = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class OracleResult:
    value: float
    estimated_error: float
    h_used: float

    def __post_init__(self):
        if not self.estimated_error >= 0:
            raise ValueError("estimated_error must be non-negative")


def _density_1d(kind, params, s):
    """Analytic unit-mass density at offset ``s`` from the centre."""
    if kind == "gaussian":
        w = params["omega_t"]
        return math.exp(-s * s / (w * w)) / (w * math.sqrt(math.pi))
    if kind == "box":
        d = params["delta"]
        return 1.0 / d if -0.5 * d <= s <= 0.5 * d else 0.0
    if kind in ("exp_forward", "exp_backward"):
        w = params["omega_t"]
        u = s if kind == "exp_forward" else -s
        return 4.0 * w**3 * u * u * math.exp(-2.0 * w * u) if u > 0 else 0.0
    if kind == "sinc":
        w = params["omega_x"]
        if s == 0.0:
            return w / math.pi
        return w / math.pi * (math.sin(w * s) / (w * s)) ** 2
    raise ValueError(f"oracle has no density for {kind!r}")


def _breakpoints(kind, params):
    # Offsets where the density is not smooth.
    if kind == "box":
        return (-0.5 * params["delta"], 0.5 * params["delta"])
    if kind in ("exp_forward", "exp_backward"):
        return (0.0,)
    return ()


def _support(kind, params):
    if kind == "box":
        return -0.5 * params["delta"], 0.5 * params["delta"]
    if kind == "exp_forward":
        return 0.0, math.inf
    if kind == "exp_backward":
        return -math.inf, 0.0
    return -math.inf, math.inf


def _trapezoid_piece(kind, params, a, b, h):
    n = max(1, math.ceil((b - a) / h - 1e-9))
    step = (b - a) / n
    total = 0.5 * (_density_1d(kind, params, a) + _density_1d(kind, params, b))
    for i in range(1, n):
        total += _density_1d(kind, params, a + i * step)
    return total * step


def _integrate(kind, params, lo, hi, h):
    cuts = sorted({lo, hi, *(c for c in _breakpoints(kind, params) if lo < c < hi)})
    return sum(_trapezoid_piece(kind, params, a, b, h) for a, b in zip(cuts, cuts[1:]))


def overlap_fraction(kind: str, params: dict, center: float, window, h: float = ORACLE_H) -> OracleResult:
    """Mass of the normalised density ``kind`` centred at ``center`` inside ``window``.

    Trapezoid rule at ``h`` on each smooth piece; the error estimate is the
    Richardson difference against ``h/2``.
    """
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError("window must be finite with lo <= hi")
    s_lo, s_hi = _support(kind, params)
    lo, hi = max(lo - center, s_lo), min(hi - center, s_hi)
    if hi <= lo:
        return OracleResult(0.0, 0.0, h)
    coarse = _integrate(kind, params, lo, hi, h)
    fine = _integrate(kind, params, lo, hi, 0.5 * h)
    return OracleResult(coarse, 4.0 / 3.0 * abs(coarse - fine), h)


def _mat(a, b):
    return [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]


def channel_pipeline_matrix(bs1_on: bool, bs2_on: bool, kappa1: float, kappa2: float) -> np.ndarray:
    """Channel part of the whole interferometer, ``B2 M B1`` with identities for absent beamsplitters."""
    eye = [[1.0, 0.0], [0.0, 1.0]]
    b1 = [[_R, -_R], [_R, _R]] if bs1_on else eye
    b2 = [[_R, _R], [-_R, _R]] if bs2_on else eye
    m = [[cmath.exp(1j * kappa1), 0.0], [0.0, cmath.exp(1j * kappa2)]]
    return np.array(_mat(b2, _mat(m, b1)), dtype=complex)


def _amplitude_shape(photon, axis, s, h):
    if axis == "t":
        kind = photon.temporal
        if kind == "gaussian":
            return math.exp(-s * s / (2.0 * photon.omega_t**2))
        if kind in ("exp_forward", "exp_backward"):
            u = s if kind == "exp_forward" else -s
            return u * math.exp(-photon.omega_t * u) if u > 0 else 0.0
        width = photon.delta_t
    else:
        kind = photon.spatial
        if kind == "sinc":
            w = photon.omega_x
            return math.sqrt(w / math.pi) * (1.0 if s == 0.0 else math.sin(w * s) / (w * s))
        width = photon.delta_x
    if kind == "box":
        slack = 1e-9 * h
        return 1.0 if -0.5 * width - slack <= s < 0.5 * width - slack else 0.0
    raise ValueError(f"oracle has no {axis} profile {kind!r}")


def _source_norm(photon, axis, lo, hi, h, center):
    n = int(round((hi - lo) / h))
    total = 0.0
    for i in range(n + 1):
        v = _amplitude_shape(photon, axis, lo + i * h - center, h) ** 2
        total += 0.5 * v if i in (0, n) else v
    return math.sqrt(total * h)


def _inside(region, t, x):
    for r in region.rects:
        if (
            r.t_lo - _EDGE_TOL <= t <= r.t_hi + _EDGE_TOL
            and r.x_lo - _EDGE_TOL <= x <= r.x_hi + _EDGE_TOL
        ):
            return True
    return False


def dense_reference_density(scenario, t_nodes, x_nodes):
    """Final detector densities on a small set of nodes, point by point.

    Returns ``{"d1": array, "d2": array}`` of shape ``(len(t_nodes), len(x_nodes))``.
    """
    t_nodes = np.asarray(t_nodes, dtype=float)
    x_nodes = np.asarray(x_nodes, dtype=float)
    if t_nodes.size > MAX_DENSE_NODES or x_nodes.size > MAX_DENSE_NODES:
        raise ValueError(f"dense reference is limited to {MAX_DENSE_NODES} nodes per axis")
    g, p = scenario.geometry, scenario.photon
    tg, xg = scenario.t_grid, scenario.x_grid
    a1 = g.x_bs1 - g.x_source
    a5 = g.x_bs2 - g.x_source
    a7 = g.x_detectors - g.x_source
    # Emission happens on the grid minus the source-detector distance.
    t_top, x_top = tg.max - a7, xg.max - a7
    norm_t = _source_norm(p, "t", tg.min, t_top, tg.h, p.t0)
    norm_x = _source_norm(p, "x", xg.min, x_top, xg.h, p.x0)
    out = {"d1": np.zeros((t_nodes.size, x_nodes.size)), "d2": np.zeros((t_nodes.size, x_nodes.size))}
    for i, t in enumerate(t_nodes):
        ts = t - a7
        if not tg.min - 1e-9 * tg.h <= ts <= t_top + 1e-9 * tg.h:
            continue
        gt = _amplitude_shape(p, "t", ts - p.t0, tg.h) / norm_t
        for j, x in enumerate(x_nodes):
            xs = x - a7
            if not xg.min - 1e-9 * xg.h <= xs <= x_top + 1e-9 * xg.h:
                continue
            gx = _amplitude_shape(p, "x", xs - p.x0, xg.h) / norm_x
            in1 = _inside(scenario.bs1, t - (a7 - a1), x - (a7 - a1))
            in2 = _inside(scenario.bs2, t - (a7 - a5), x - (a7 - a5))
            m = channel_pipeline_matrix(in1, in2, scenario.kappa1, scenario.kappa2)
            rho = abs(gt * gx) ** 2
            out["d1"][i, j] = rho * abs(m[0, 0]) ** 2
            out["d2"][i, j] = rho * abs(m[1, 0]) ** 2
    return out


# (name, kind, params, center, window) for every frozen reference value.
DERIVED_CASES = (
    ("scenario1_q", "gaussian", {"omega_t": 1.0}, 15.0, (18.0, 21.0)),
    ("scenario1_q_omega0.5", "gaussian", {"omega_t": 0.5}, 15.0, (18.0, 21.0)),
    ("scenario1_q_omega2", "gaussian", {"omega_t": 2.0}, 15.0, (18.0, 21.0)),
    ("gaussian_center15_14_16", "gaussian", {"omega_t": 1.0}, 15.0, (14.0, 16.0)),
    ("box_center5_4_6", "box", {"delta": 2.0}, 5.0, (4.0, 6.0)),
    ("backward_tail_bs2", "exp_backward", {"omega_t": 1.0}, 15.0, (16.5, 19.5)),
    ("forward_tail_bs2", "exp_forward", {"omega_t": 1.0}, 15.0, (16.5, 19.5)),
    ("forward_tail_bs1", "exp_forward", {"omega_t": 1.0}, 5.0, (1.5, 4.5)),
    ("backward_tail_bs1", "exp_backward", {"omega_t": 1.0}, 5.0, (1.5, 4.5)),
    ("forward_tail_peak_window", "exp_forward", {"omega_t": 1.0}, 0.0, (0.0, 2.0)),
    ("gaussian_bs1_scenario2", "gaussian", {"omega_t": 1.0}, 5.0, (1.5, 4.5)),
    ("gaussian_bs2_scenario2", "gaussian", {"omega_t": 1.0}, 15.0, (16.5, 19.5)),
    ("gaussian_bs1_scenario3", "gaussian", {"omega_t": 1.0}, 5.0, (6.5, 7.5)),
    ("gaussian_bs2_scenario3", "gaussian", {"omega_t": 1.0}, 15.0, (6.5, 9.5)),
    ("symmetry_plus_1_2", "gaussian", {"omega_t": 1.0}, 15.0, (16.0, 17.0)),
    ("symmetry_minus_1_2", "gaussian", {"omega_t": 1.0}, 15.0, (13.0, 14.0)),
    ("symmetry_plus_3_6", "gaussian", {"omega_t": 1.0}, 15.0, (18.0, 21.0)),
    ("symmetry_minus_3_6", "gaussian", {"omega_t": 1.0}, 15.0, (9.0, 12.0)),
    ("symmetry_plus_0_5", "gaussian", {"omega_t": 1.0}, 15.0, (15.0, 20.0)),
    ("symmetry_minus_0_5", "gaussian", {"omega_t": 1.0}, 15.0, (10.0, 15.0)),
    ("sinc40_half_width_10", "sinc", {"omega_x": 40.0}, 0.0, (-10.0, 10.0)),
)

FIXTURE_FIELDS = ("name", "value", "estimated_error", "oracle_op", "params")


def _render_params(kind, params, center, window):
    items = [("kind", kind), *sorted(params.items()), ("center", center), ("window", f"{window[0]!r}:{window[1]!r}")]
    return ";".join(f"{k}={v}" for k, v in items)


def derived_values():
    """Rows for the fixture file, one per entry of :data:`DERIVED_CASES`."""
    rows = []
    for name, kind, params, center, window in DERIVED_CASES:
        res = overlap_fraction(kind, params, center, window)
        rows.append(
            {
                "name": name,
                "value": repr(res.value),
                "estimated_error": repr(res.estimated_error),
                "oracle_op": "overlap_fraction",
                "params": _render_params(kind, params, center, window),
            }
        )
    return rows


def write_fixtures(path) -> int:
    rows = derived_values()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=FIXTURE_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return len(rows)


def read_fixtures(path) -> dict:
    """Map fixture name to an :class:`OracleResult`."""
    with open(path, newline="", encoding="utf-8") as fh:
        return {
            row["name"]: OracleResult(float(row["value"]), float(row["estimated_error"]), ORACLE_H)
            for row in csv.DictReader(fh)
        }
