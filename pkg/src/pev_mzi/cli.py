"""Command-line front end ``pev-mzi``.

Exit codes: 0 on success, 2 for usage, config and I/O problems, 3 when the
physics fails (annihilated branch, truncated profile, photon pushed off the
grid).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .closed_form import detection_curve, density_on_grid, detector_position, total_probabilities
from .engine import dump_state, run_pipeline, state_probabilities
from .errors import ConfigError, PevError, PhysicsError
from .optics import Detector
from .regions import parse_windows, render_windows
from .scenarios import PRESETS, Scenario, check, load_config, parse_angle, preset, render, validate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PHYSICS = 3

CSV_HEADER = "t_bar,prob_d1,prob_d2,cum_d1,cum_d2"
SWEEP_PARAMS = ("omega_t", "omega_x", "kappa1", "kappa2", "bs1.present_t", "bs2.present_t")
MODES = ("closed", "pipeline", "both")
DEFAULT_FIXTURE_PATH = os.path.join("fixtures", "derived_values.csv")


class UsageError(PevError, ValueError):
    """Bad command-line input or unusable output location."""


@dataclass(frozen=True)
class RunReport:
    scenario_name: str
    digest: str
    mode: str
    totals: tuple
    curve_paths: tuple
    step_log: str
    convergence_delta: float | None
    wall_time: float
    pipeline_totals: tuple | None = None
    discrepancy: float | None = None
    warnings: tuple = ()
    step_pre_norms: tuple = ()

    def render(self) -> str:
        lines = [
            f"scenario: {self.scenario_name}",
            f"digest: sha256:{self.digest}",
            f"mode: {self.mode}",
            f"p_d1: {self.totals[0]:.12g}",
            f"p_d2: {self.totals[1]:.12g}",
            f"p_sum: {self.totals[0] + self.totals[1]:.12g}",
        ]
        if self.pipeline_totals is not None:
            lines += [
                f"pipeline_p_d1: {self.pipeline_totals[0]:.12g}",
                f"pipeline_p_d2: {self.pipeline_totals[1]:.12g}",
            ]
        if self.discrepancy is not None:
            lines.append(f"max_density_discrepancy: {self.discrepancy:.3e}")
        delta = "n/a" if self.convergence_delta is None else f"{self.convergence_delta:.3e}"
        lines.append(f"grid_convergence_delta_2h: {delta}")
        lines.append("curves: " + ", ".join(self.curve_paths))
        lines.append(f"wall_time_s: {self.wall_time:.3f}")
        lines.append("warnings:" + ("" if self.warnings else " none"))
        lines += [f"  - {w}" for w in self.warnings]
        lines.append("step_log:")
        lines += [f"  {row}" for row in self.step_log.splitlines()] or ["  n/a"]
        return "\n".join(lines) + "\n"


def scenario_digest(scenario: Scenario) -> str:
    return hashlib.sha256(render(scenario).encode("utf-8")).hexdigest()


def curve_csv(t_bar, prob_d1, prob_d2) -> str:
    """CSV text in the fixed schema; probabilities are clipped at zero."""
    p1 = np.maximum(0.0, np.asarray(prob_d1, dtype=float))
    p2 = np.maximum(0.0, np.asarray(prob_d2, dtype=float))
    rows = [CSV_HEADER]
    for row in zip(t_bar, p1, p2, np.cumsum(p1), np.cumsum(p2)):
        rows.append(",".join("%.12g" % v for v in row))
    return "\n".join(rows) + "\n"


def _windows(scenario: Scenario):
    d = scenario.detector
    tg, xg = scenario.t_grid, scenario.x_grid
    t_bars = d.tbar_values(tg)
    t_lo = np.clip(t_bars - 0.5 * d.eps_t, tg.min, tg.max)
    t_hi = np.clip(t_bars + 0.5 * d.eps_t, tg.min, tg.max)
    if d.eps_x is None:
        x_lo, x_hi = xg.min, xg.max
    else:
        x_bar = detector_position(scenario)
        x_lo, x_hi = max(x_bar - 0.5 * d.eps_x, xg.min), min(x_bar + 0.5 * d.eps_x, xg.max)
    return t_bars, t_lo, t_hi, x_lo, x_hi


def _convergence_delta(scenario: Scenario, totals) -> float | None:
    try:
        coarse = scenario.with_(
            t_grid=scenario.t_grid.with_spacing(2 * scenario.t_grid.h),
            x_grid=scenario.x_grid.with_spacing(2 * scenario.x_grid.h),
        )
        check(coarse)
        coarse_totals = total_probabilities(coarse)
    except (PevError, ValueError):
        return None
    return max(abs(a - b) for a, b in zip(totals, coarse_totals))


def evaluate(scenario: Scenario, mode: str = "closed", dump_path=None):
    """Compute curves and the report fields; return ``(csv_text, RunReport)`` without writing."""
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    start = time.perf_counter()
    warnings_ = tuple(validate(scenario))
    totals = total_probabilities(scenario)
    t_bars, t_lo, t_hi, x_lo, x_hi = _windows(scenario)
    step_log = ""
    pre_norms = ()
    pipeline_totals = discrepancy = None
    if mode in ("closed", "both"):
        p1 = detection_curve(scenario, Detector.D1).probability
        p2 = detection_curve(scenario, Detector.D2).probability
    if mode in ("pipeline", "both"):
        state, log = run_pipeline(scenario)
        step_log = log.summary()
        pre_norms = tuple(log.pre_norms())
        full_t = (scenario.t_grid.min, scenario.t_grid.max)
        pipeline_totals = tuple(
            max(0.0, float(state_probabilities(state, d, *full_t)[0])) for d in Detector
        )
        if mode == "pipeline":
            p1 = state_probabilities(state, Detector.D1, t_lo, t_hi, x_lo, x_hi)
            p2 = state_probabilities(state, Detector.D2, t_lo, t_hi, x_lo, x_hi)
            totals = pipeline_totals
        else:
            discrepancy = max(
                float(np.max(np.abs(state.density(d.channel) - density_on_grid(scenario, d))))
                for d in Detector
            )
        if dump_path is not None:
            dump_state(state, dump_path, binary=str(dump_path).endswith(".npy"))
        del state
    elif dump_path is not None:
        raise UsageError("--dump-state needs --mode pipeline or both")
    text = curve_csv(t_bars, p1, p2)
    report = RunReport(
        scenario_name=scenario.name,
        digest=scenario_digest(scenario),
        mode=mode,
        totals=tuple(totals),
        curve_paths=("curve_d1.csv", "curve_d2.csv"),
        step_log=step_log,
        convergence_delta=_convergence_delta(scenario, totals),
        wall_time=time.perf_counter() - start,
        pipeline_totals=pipeline_totals,
        discrepancy=discrepancy,
        warnings=warnings_,
        step_pre_norms=pre_norms,
    )
    return text, report


def prepare_out_dir(out_dir) -> None:
    """Create ``out_dir`` and prove it is writable, before any computation."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, f".pev-mzi-probe-{os.getpid()}")
        with open(probe, "w", encoding="utf-8"):
            pass
        os.remove(probe)
    except OSError as exc:
        raise UsageError(f"output directory {out_dir!r} is not writable: {exc}") from None


def write_files(out_dir, files: dict) -> None:
    """Write all files or none: contents go to temporaries that are renamed at the end."""
    staged = []
    try:
        for name, text in files.items():
            tmp = os.path.join(out_dir, f".{name}.tmp")
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            staged.append((tmp, os.path.join(out_dir, name)))
    except OSError as exc:
        for tmp, _ in staged:
            os.remove(tmp)
        raise UsageError(f"cannot write to {out_dir!r}: {exc}") from None
    for tmp, final in staged:
        os.replace(tmp, final)


def run_scenario(scenario: Scenario, out_dir, mode="closed", dump_path=None) -> RunReport:
    prepare_out_dir(out_dir)
    text, report = evaluate(scenario, mode, dump_path)
    report = replace(
        report, curve_paths=tuple(os.path.join(out_dir, p) for p in report.curve_paths)
    )
    write_files(
        out_dir, {"curve_d1.csv": text, "curve_d2.csv": text, "report.txt": report.render()}
    )
    return report


def cmd_run(config_path, out_dir, mode="closed", dump_path=None) -> RunReport:
    try:
        scenario = load_config(config_path)
    except OSError as exc:
        raise UsageError(f"cannot read config {config_path!r}: {exc}") from None
    return run_scenario(scenario, out_dir, mode, dump_path)


def cmd_preset(name, out_dir, mode="closed", dump_path=None) -> RunReport:
    return run_scenario(preset(name), out_dir, mode, dump_path)


def resolve_scenario(source: str) -> Scenario:
    """A config file path, or a preset name when no such file exists."""
    if os.path.exists(source):
        try:
            return load_config(source)
        except OSError as exc:
            raise UsageError(f"cannot read config {source!r}: {exc}") from None
    if source in PRESETS:
        return preset(source)
    raise UsageError(f"{source!r} is neither a config file nor a preset name")


def apply_param(scenario: Scenario, param: str, value: str) -> Scenario:
    """Scenario with one sweep parameter replaced; ``;`` separates windows in one value."""
    value = value.strip()
    if param in ("omega_t", "omega_x"):
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"{param}: expected a number, got {value!r}") from None
        changed = scenario.with_(photon=replace(scenario.photon, **{param: number}))
    elif param in ("kappa1", "kappa2"):
        changed = scenario.with_(**{param: parse_angle(value, param)})
    elif param in ("bs1.present_t", "bs2.present_t"):
        which = param.split(".")[0]
        region = getattr(scenario, which)
        _, extent = render_windows(region)
        new = parse_windows(value.replace(";", ","), extent, which.upper())
        changed = scenario.with_(**{which: new})
    else:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    return check(changed)


def thread_count() -> int:
    raw = os.environ.get("PEV_MZI_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PEV_MZI_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("PEV_MZI_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", text).strip("_") or "value"


def cmd_sweep(source, param, values, out_dir, mode="closed"):
    """Run one scenario per value; returns the reports in input order."""
    values = [v for v in values if v.strip()]
    if not values:
        raise UsageError("sweep needs at least one value")
    if param not in SWEEP_PARAMS:
        raise UsageError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    base = resolve_scenario(source)
    scenarios = [
        apply_param(base, param, v).with_(name=f"{base.name}[{param}={v.strip()}]") for v in values
    ]
    prepare_out_dir(out_dir)
    dirs = [os.path.join(out_dir, f"{i:03d}_{_slug(v)}") for i, v in enumerate(values)]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        reports = list(pool.map(lambda args: run_scenario(*args, mode), zip(scenarios, dirs)))
    rows = ["value,p_d1,p_d2"]
    rows += [f"{v.strip()},{r.totals[0]:.12g},{r.totals[1]:.12g}" for v, r in zip(values, reports)]
    write_files(out_dir, {"sweep_summary.csv": "\n".join(rows) + "\n"})
    return reports


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pev-mzi",
        description="Single-photon Mach-Zehnder interferometer with spacetime-gated beamsplitters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p):
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--mode", choices=MODES, default="closed")

    p = sub.add_parser("run", help="evaluate a config file")
    p.add_argument("config")
    outputs(p)
    p.add_argument("--dump-state", metavar="FILE", help="write the final grid state (.npy for binary)")

    p = sub.add_parser("preset", help="evaluate a named preset")
    p.add_argument("name")
    outputs(p)
    p.add_argument("--dump-state", metavar="FILE", help="write the final grid state (.npy for binary)")

    p = sub.add_parser("sweep", help="evaluate a config or preset for several parameter values")
    p.add_argument("config", help="config file, or a preset name")
    p.add_argument("--param", required=True, help=f"one of {', '.join(SWEEP_PARAMS)}")
    p.add_argument("--values", required=True, help="comma-separated values")
    outputs(p)

    sub.add_parser("list-presets", help="print the preset names")

    p = sub.add_parser("oracle", help="reference computations")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    regen = oracle_sub.add_parser("regen", help="rewrite the derived-values fixture file")
    regen.add_argument("--out", default=DEFAULT_FIXTURE_PATH)
    return parser


def _dispatch(args) -> None:
    if args.command == "list-presets":
        print("\n".join(PRESETS))
    elif args.command == "oracle":
        from .oracle import write_fixtures

        directory = os.path.dirname(args.out)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            n = write_fixtures(args.out)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out!r}: {exc}") from None
        print(f"wrote {n} derived values to {args.out}")
    elif args.command == "run":
        print(cmd_run(args.config, args.out, args.mode, args.dump_state).render(), end="")
    elif args.command == "preset":
        print(cmd_preset(args.name, args.out, args.mode, args.dump_state).render(), end="")
    elif args.command == "sweep":
        reports = cmd_sweep(args.config, args.param, args.values.split(","), args.out, args.mode)
        for r in reports:
            print(f"{r.scenario_name}: p_d1={r.totals[0]:.12g} p_d2={r.totals[1]:.12g}")
        print(f"summary: {os.path.join(args.out, 'sweep_summary.csv')}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _dispatch(args)
    except PhysicsError as exc:
        print(f"pev-mzi: physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (PevError, ValueError, OSError) as exc:
        print(f"pev-mzi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
