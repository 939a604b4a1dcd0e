import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pev_mzi.errors import DomainError, SnappingError
from pev_mzi.grid import AxisGrid, CumulativeIntegral, monotone_slopes, trapezoid, window_weights


def test_axis_grid_points_are_exact():
    g = AxisGrid(-10.0, 30.0, 0.02)
    assert g.count == 2001
    pts = g.points
    assert pts[0] == -10.0
    assert pts[-1] == pytest.approx(30.0, abs=1e-12)
    assert np.allclose(np.diff(pts), 0.02)


@pytest.mark.parametrize(
    "lo,hi,h",
    [(0.0, 1.0, 0.0), (0.0, 1.0, -0.1), (1.0, 1.0, 0.1), (2.0, 1.0, 0.1), (0.0, 1.0, 0.3)],
)
def test_axis_grid_rejects_bad_parameters(lo, hi, h):
    with pytest.raises(ValueError):
        AxisGrid(lo, hi, h)


def test_steps_snaps_whole_cells_only():
    g = AxisGrid(0.0, 40.0, 0.02)
    assert g.steps(5.0) == 250
    assert g.steps(-5.0) == -250
    with pytest.raises(SnappingError):
        g.steps(0.011)


def test_index_and_sub():
    g = AxisGrid(0.0, 40.0, 0.02)
    assert g.index(5.0) == 250
    with pytest.raises(DomainError):
        g.index(41.0)
    sub = g.sub(2.0, 4.0)
    assert sub.is_aligned_subgrid_of(g)
    assert sub.count == 101
    assert not AxisGrid(0.01, 4.01, 0.02).is_aligned_subgrid_of(g)


def test_trapezoid_matches_closed_form_on_quadratic():
    g = AxisGrid(0.0, 2.0, 0.001)
    # Trapezoid error for x^2 is exactly h^2 (b - a) / 6.
    assert trapezoid(g.points**2, g.h) == pytest.approx(8 / 3 + g.h**2 * 2 / 6, rel=1e-12)


def test_window_weights_full_grid_are_trapezoid_weights():
    g = AxisGrid(0.0, 1.0, 0.1)
    w = window_weights(g, -5.0, 5.0)
    expected = np.full(g.count, 0.1)
    expected[[0, -1]] = 0.05
    assert np.allclose(w, expected, atol=1e-15)


def test_window_weights_integrate_linear_functions_exactly():
    g = AxisGrid(0.0, 4.0, 0.25)
    f = 3.0 * g.points - 1.0
    lo, hi = 0.37, 2.91
    exact = 1.5 * (hi**2 - lo**2) - (hi - lo)
    assert window_weights(g, lo, hi) @ f == pytest.approx(exact, rel=1e-13)


def test_monotone_slopes_vanish_at_extrema_and_ends():
    f = np.array([0.0, 1.0, 4.0, 9.0, 4.0, 1.0, 0.0])
    d = monotone_slopes(f, 1.0)
    assert d[0] == d[-1] == 0.0
    assert d[3] == 0.0
    assert d[2] == pytest.approx(4.0)


def test_cumulative_total_equals_trapezoid_sum():
    g = AxisGrid(-5.0, 5.0, 0.05)
    f = np.exp(-g.points**2)
    assert CumulativeIntegral(g, f).total == pytest.approx(trapezoid(f, g.h), rel=1e-14)


@pytest.mark.parametrize("a,b", [(0.41, 1.3), (0.4, 1.3), (-2.013, 0.5)])
def test_cumulative_fourth_order_on_smooth_data(a, b):
    exact = 0.5 * (math.erf(b) - math.erf(a))
    errors = []
    for h in (0.02, 0.01):
        g = AxisGrid(-8.0, 8.0, h)
        ci = CumulativeIntegral(g, np.exp(-g.points**2) / math.sqrt(math.pi))
        errors.append(abs(float(ci.between(a, b)) - exact))
    assert errors[0] < 1e-8
    assert errors[1] < errors[0] / 8


def test_cumulative_is_exactly_zero_on_zero_cells():
    g = AxisGrid(0.0, 10.0, 0.1)
    f = np.where(g.points < 5.0 - 1e-9, np.sin(g.points) ** 2, 0.0)
    ci = CumulativeIntegral(g, f)
    assert float(ci.between(5.0, 9.3)) == 0.0
    assert float(ci.between(6.0, 6.0)) == 0.0


def test_cumulative_never_negative_next_to_a_jump():
    g = AxisGrid(0.0, 4.0, 0.1)
    f = np.where(g.points < 2.0 - 1e-9, 1.0, 0.0)
    ci = CumulativeIntegral(g, f)
    samples = np.linspace(0.0, 4.0, 1201)
    assert np.all(np.diff(ci.at(samples)) >= -1e-15)


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-6, 6),
    b=st.floats(-6, 6),
    c=st.floats(-6, 6),
)
def test_cumulative_additive(a, b, c):
    a, b, c = sorted((a, b, c))
    g = AxisGrid(-6.0, 6.0, 0.05)
    ci = CumulativeIntegral(g, np.exp(-0.5 * g.points**2) * (1 + 0.3 * np.sin(3 * g.points)))
    whole = float(ci.between(a, c))
    parts = float(ci.between(a, b)) + float(ci.between(b, c))
    assert whole == pytest.approx(parts, abs=1e-12)
