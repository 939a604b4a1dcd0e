import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from pev_mzi.cli import (
    CSV_HEADER,
    EXIT_OK,
    EXIT_PHYSICS,
    EXIT_USAGE,
    apply_param,
    curve_csv,
    main,
    scenario_digest,
    thread_count,
)
from pev_mzi.errors import ConfigError
from pev_mzi.scenarios import PRESETS, preset


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_preset_run_writes_curves_and_report(tmp_path, capsys):
    out = tmp_path / "s1"
    assert main(["preset", "scenario1", "--out", str(out)]) == EXIT_OK
    text = (out / "curve_d2.csv").read_text()
    assert text.splitlines()[0] == CSV_HEADER
    assert (out / "curve_d1.csv").read_text() == text
    rows = read_csv(out / "curve_d2.csv")
    s = preset("scenario1")
    assert len(rows) == len(s.detector.tbar_values(s.t_grid))
    assert all(float(r["prob_d2"]) <= 1e-12 for r in rows if float(r["t_bar"]) < 23.0)
    report = (out / "report.txt").read_text()
    assert report == capsys.readouterr().out
    assert f"digest: sha256:{scenario_digest(s)}" in report
    assert "grid_convergence_delta_2h:" in report


def test_run_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("[bs2]\npresent_t = 18:21\n[detector]\ntbar = 19:27:0.5\neps_t = 0.5\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    rows = read_csv(tmp_path / "o" / "curve_d1.csv")
    assert [float(r["t_bar"]) for r in rows] == pytest.approx(np.arange(19.0, 27.01, 0.5))
    cum = [float(r["cum_d1"]) for r in rows]
    assert cum == sorted(cum)


def test_pipeline_mode_and_state_dump(tmp_path):
    dump = tmp_path / "state.npy"
    out = tmp_path / "o"
    assert main(["preset", "baseline-bs1-only", "--out", str(out), "--mode", "both", "--dump-state", str(dump)]) == 0
    report = (out / "report.txt").read_text()
    assert "pipeline_p_d1: 0.5" in report and "max_density_discrepancy" in report
    assert "tau7" in report
    table = np.load(dump)
    assert table.shape[1] == 6


def test_dump_state_needs_pipeline(tmp_path):
    code = main(["preset", "scenario1", "--out", str(tmp_path), "--dump-state", str(tmp_path / "s.txt")])
    assert code == EXIT_USAGE


def test_deterministic_output(tmp_path):
    for d in ("a", "b"):
        assert main(["preset", "scenario3", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "curve_d1.csv").read_bytes() == (tmp_path / "b" / "curve_d1.csv").read_bytes()


class TestSweep:
    def test_kappa2_sweep_on_balanced_interferometer(self, tmp_path):
        out = tmp_path / "sw"
        assert main(["sweep", "baseline-both", "--param", "kappa2", "--values", "0,pi/2,pi", "--out", str(out)]) == 0
        rows = read_csv(out / "sweep_summary.csv")
        assert [r["value"] for r in rows] == ["0", "pi/2", "pi"]
        assert [float(r["p_d1"]) for r in rows] == pytest.approx([0.0, 0.5, 1.0], abs=1e-9)
        assert sorted(os.listdir(out)) == ["000_0", "001_pi_2", "002_pi", "sweep_summary.csv"]

    def test_omega_sweep_increases_leakage(self, tmp_path):
        # omega_t = 2 needs a longer time axis than the default grid.
        cfg = tmp_path / "s1.cfg"
        cfg.write_text("[bs2]\npresent_t = 18:21\n[grid]\nt = -20:40:0.02\n")
        out = tmp_path / "sw"
        assert main(["sweep", str(cfg), "--param", "omega_t", "--values", "0.5,1,2", "--out", str(out)]) == 0
        p2 = [float(r["p_d2"]) for r in read_csv(out / "sweep_summary.csv")]
        assert p2[0] < p2[1] < p2[2]

    def test_window_values_use_semicolons(self):
        s = apply_param(preset("scenario3"), "bs1.present_t", "1:2; 3:4")
        assert [(r.t_lo, r.t_hi) for r in s.bs1.rects] == [(1.0, 2.0), (3.0, 4.0)]

    @pytest.mark.parametrize(
        "argv",
        [
            ["sweep", "scenario1", "--param", "omega_t", "--values", " , "],
            ["sweep", "scenario1", "--param", "delta_t", "--values", "1"],
            ["sweep", "no-such-thing", "--param", "omega_t", "--values", "1"],
            ["sweep", "scenario1", "--param", "omega_t", "--values", "fast"],
        ],
    )
    def test_bad_sweeps(self, tmp_path, argv):
        assert main(argv + ["--out", str(tmp_path / "o")]) == EXIT_USAGE

    def test_apply_param_rejects_unknown(self):
        with pytest.raises(ConfigError):
            apply_param(preset("scenario1"), "kappa1", "90deg")


class TestExitCodes:
    def test_unknown_preset(self, tmp_path):
        assert main(["preset", "scenario9", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["run", str(tmp_path / "missing.cfg"), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_bad_arguments(self):
        assert main(["preset"]) == EXIT_USAGE

    def test_unwritable_directory_leaves_nothing(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        target = blocker / "out"
        assert main(["preset", "scenario1", "--out", str(target)]) == EXIT_USAGE
        assert sorted(os.listdir(tmp_path)) == ["file"]

    def test_physics_error(self, tmp_path, capsys):
        cfg = tmp_path / "wide.cfg"
        cfg.write_text("[photon]\nomega_t = 3\n")
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_PHYSICS
        assert "physics error" in capsys.readouterr().err
        assert not (tmp_path / "o" / "curve_d1.csv").exists()

    def test_bad_mode(self, tmp_path):
        assert main(["preset", "scenario1", "--mode", "fast", "--out", str(tmp_path)]) == EXIT_USAGE


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    assert capsys.readouterr().out.split() == list(PRESETS)


def test_oracle_regen(tmp_path, capsys):
    target = tmp_path / "fx" / "derived.csv"
    assert main(["oracle", "regen", "--out", str(target)]) == 0
    assert target.read_text().startswith("name,value,estimated_error,oracle_op,params")


def test_csv_clips_negative_noise():
    text = curve_csv([0.0, 1.0], [-1e-18, 0.25], [0.5, 0.25])
    assert text.splitlines() == [CSV_HEADER, "0,0,0.5,0,0.5", "1,0.25,0.25,0.25,0.75"]


def test_digest_tracks_physics():
    a = preset("scenario1")
    assert scenario_digest(a) == scenario_digest(preset("scenario1"))
    assert scenario_digest(a) != scenario_digest(a.with_(kappa2=0.0))


@pytest.mark.parametrize("raw,expected", [("1", 1), ("3", 3), ("", os.cpu_count() or 1), ("0", os.cpu_count() or 1)])
def test_thread_count(monkeypatch, raw, expected):
    monkeypatch.setenv("PEV_MZI_THREADS", raw)
    assert thread_count() == expected


def test_thread_count_rejects_garbage(monkeypatch):
    monkeypatch.setenv("PEV_MZI_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pev_mzi.cli", "list-presets"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "scenario1" in proc.stdout
