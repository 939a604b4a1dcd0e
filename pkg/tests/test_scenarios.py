import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pev_mzi.errors import ConfigError, TruncationError
from pev_mzi.grid import AxisGrid
from pev_mzi.regions import Rect, SpacetimeRegion, parse_windows
from pev_mzi.scenarios import (
    PRESETS,
    DetectorSpec,
    Geometry,
    Photon,
    Scenario,
    build_profiles,
    check,
    load_config,
    mixed_mass,
    parse_angle,
    parse_config,
    preset,
    render,
    validate,
)


class TestPresets:
    def test_baseline_both(self):
        s = preset("baseline-both")
        assert s.bs1 == SpacetimeRegion.always() and s.bs2 == SpacetimeRegion.always()

    def test_scenario1(self):
        s = preset("scenario1")
        assert s.bs1.is_empty
        assert [(r.t_lo, r.t_hi) for r in s.bs2.rects] == [(18.0, 21.0)]
        assert s.photon.temporal == "gaussian"

    def test_scenario3(self):
        s = preset("scenario3")
        assert s.bs2 == SpacetimeRegion.time_windows([(6.5, 9.5)])
        assert s.bs1 == SpacetimeRegion.time_windows([(6.5, 7.5)])

    @pytest.mark.parametrize("name", ["scenario2-forward", "scenario2-gaussian"])
    def test_scenario2_windows(self, name):
        s = preset(name)
        assert s.bs1 == SpacetimeRegion.time_windows([(1.5, 4.5)])
        assert s.bs2 == SpacetimeRegion.time_windows([(16.5, 19.5)])

    def test_scenario2_backward_keeps_only_bs2(self):
        s = preset("scenario2-backward")
        assert s.bs1.is_empty
        assert s.bs2 == SpacetimeRegion.time_windows([(16.5, 19.5)])
        assert s.photon.temporal == "exp_backward"

    @pytest.mark.parametrize("name", PRESETS)
    def test_common_parameters(self, name):
        s = preset(name)
        g = s.geometry
        assert (g.x_source, g.x_bs1, g.x_mirrors, g.x_bs2, g.x_detectors) == (0, 5, 10, 15, 20)
        assert s.kappa1 == s.kappa2 == math.pi
        assert s.photon.omega_t == 1.0 and s.photon.omega_x == 2.0
        assert g.alpha7 - g.alpha1 == 15 and g.alpha7 - g.alpha5 == 5

    @pytest.mark.parametrize("name", PRESETS)
    def test_presets_are_valid(self, name):
        check(preset(name))
        assert isinstance(validate(preset(name)), list)

    def test_unknown(self):
        with pytest.raises(ConfigError):
            preset("scenario4")


class TestParseConfig:
    def test_minimal_config_is_scenario1(self):
        assert parse_config("[bs2]\npresent_t = 18:21\n") == preset("scenario1")

    def test_kappa_in_radians(self):
        s = parse_config("[mirrors]\nkappa1 = 3.14159\n")
        assert s.kappa1 == 3.14159

    @pytest.mark.parametrize(
        "text,value",
        [("pi", math.pi), ("pi/2", math.pi / 2), ("0.5*pi", math.pi / 2), ("-pi", -math.pi), ("2pi", 2 * math.pi)],
    )
    def test_angles_in_units_of_pi(self, text, value):
        assert parse_angle(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["90deg", "90 degrees", "90°"])
    def test_degrees_rejected(self, text):
        with pytest.raises(ConfigError, match="radians"):
            parse_config(f"[mirrors]\nkappa1 = {text}\n")

    def test_reversed_window(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("[bs2]\npresent_t = 21:18\n")

    @pytest.mark.parametrize(
        "text,match",
        [
            ("[photon]\ncolour = red\n", "unknown key"),
            ("[lens]\n", "unknown section"),
            ("omega_t = 1\n", "outside"),
            ("[photon]\nomega_t 1\n", "key = value"),
            ("[photon]\nomega_t = 1\nomega_t = 2\n", "duplicate"),
            ("[photon]\nomega_t = fast\n", "number"),
            ("[photon]\ntemporal = lorentzian\n", "temporal"),
            ("[geometry]\nx_bs1 = 12\n", "geometry"),
            ("[geometry]\nx_bs1 = 5.01\n", "multiple"),
            ("[grid]\nt = 0:40:0.3\n", "grid"),
            ("[detector]\neps_t = 0\n", "positive"),
            ("[bs1]\nextent_x = 0:1\n", "without present_t"),
        ],
    )
    def test_errors(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(text)

    def test_truncation_is_a_physics_error(self):
        with pytest.raises(TruncationError):
            parse_config("[photon]\nomega_t = 3\n")

    @pytest.mark.filterwarnings("ignore::pev_mzi.errors.TruncationWarning")
    def test_full_config(self, tmp_path):
        spec = tmp_path / "spec.txt"
        spec.write_text("-1 0.1\n0 1\n1 0.1\n")
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "# a comment\n"
            "[photon]\ntemporal = spectrum:spec.txt\nspatial = box\ndelta_x = 3\n"
            "[bs1]\npresent_t = 1:2, 3:4\nextent_x = -1:8\n"
            "[mirrors]\nkappa2 = pi/2\n"
            "[detector]\neps_t = 0.2\neps_x = 1.5\ntbar = 15:25:0.2\n"
        )
        s = load_config(cfg)
        assert s.name == "exp"
        assert s.photon.temporal == "spectrum" and s.photon.spectrum_path == str(spec)
        assert s.bs1.rects[1] == Rect(3.0, 4.0, -1.0, 8.0)
        assert s.kappa2 == pytest.approx(math.pi / 2)
        assert s.detector == DetectorSpec(0.2, 1.5, (15.0, 25.0, 0.2))


windows = st.lists(
    st.tuples(st.floats(-5, 25).map(lambda v: round(v, 3)), st.floats(0.1, 5).map(lambda v: round(v, 3))),
    max_size=3,
).map(lambda ws: tuple((lo, lo + w) for lo, w in ws))


@settings(max_examples=40, deadline=None)
@given(
    w1=windows,
    w2=windows,
    k1=st.floats(-7, 7),
    k2=st.floats(-7, 7),
    omega_t=st.floats(0.3, 1.2),
    eps_t=st.sampled_from([0.05, 0.1, 0.5]),
    eps_x=st.one_of(st.none(), st.floats(0.5, 4.0)),
    temporal=st.sampled_from(["gaussian", "box"]),
)
def test_render_round_trip(w1, w2, k1, k2, omega_t, eps_t, eps_x, temporal):
    s = Scenario(
        photon=Photon(temporal=temporal, omega_t=omega_t),
        bs1=SpacetimeRegion.time_windows(w1, "BS1") if w1 else SpacetimeRegion.never("BS1"),
        bs2=SpacetimeRegion.time_windows(w2, "BS2", (-3.0, 4.5)) if w2 else SpacetimeRegion.never("BS2"),
        kappa1=k1,
        kappa2=k2,
        detector=DetectorSpec(eps_t, eps_x),
    )
    assert parse_config(render(s)) == s


class TestValidate:
    def test_baseline_both_is_clean(self):
        assert validate(preset("baseline-both")) == []

    def test_dead_window(self):
        s = preset("scenario1").with_(bs2=SpacetimeRegion.time_windows([(100.0, 101.0)], "BS2"))
        assert any("BS2" in w and "dead" in w for w in validate(s))

    def test_backward_tail_never_meets_bs2(self):
        s = preset("scenario2-forward").with_(photon=Photon(temporal="exp_backward"))
        s = s.with_(t_grid=AxisGrid(-34.0, 22.0, 0.02))
        assert any("BS2" in w and "dead" in w for w in validate(s))

    def test_clipped_detector_window(self):
        s = preset("scenario1").with_(detector=DetectorSpec(0.1, None, (29.0, 30.0, 0.1)))
        assert any("clipped" in w for w in validate(s))

    @pytest.mark.filterwarnings("ignore::pev_mzi.errors.TruncationWarning")
    def test_tail_mass_warning(self):
        s = preset("scenario1").with_(photon=Photon(spatial="sinc", omega_x=40.0))
        assert any("spatial profile loses" in w for w in validate(s))


def test_mixed_mass_is_monotone_in_window(derived):
    s = preset("scenario1")
    inner = mixed_mass(s, SpacetimeRegion.time_windows([(18.0, 21.0)]), 15.0)
    outer = mixed_mass(s, SpacetimeRegion.time_windows([(17.0, 22.0)]), 15.0)
    assert outer >= inner
    ref = derived["scenario1_q"]
    assert inner == pytest.approx(ref.value, abs=ref.estimated_error + 1e-9)


def test_source_grid_leaves_room_for_travel():
    s = preset("baseline-none")
    t_src, x_src = s.source_grids()
    assert t_src.max == s.t_grid.max - 20.0
    temporal, spatial = build_profiles(s)
    assert temporal.grid == t_src and spatial.grid == x_src


def test_geometry_properties():
    g = Geometry(x_source=1.0, x_bs1=3.0, x_mirrors=4.0, x_bs2=6.0, x_detectors=9.0)
    assert (g.alpha1, g.alpha3, g.alpha5, g.alpha7) == (2.0, 3.0, 5.0, 8.0)


def test_scenario_equality_ignores_name():
    assert preset("scenario1").with_(name="other") == preset("scenario1")


def test_config_windows_match_region_parser():
    s = parse_config("[bs1]\npresent_t = 6.5:7.5, 9:12\n")
    assert s.bs1 == parse_windows("6.5:7.5, 9:12")
