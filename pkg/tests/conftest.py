import os
from pathlib import Path

import pytest

from pev_mzi.cli import evaluate
from pev_mzi.oracle import read_fixtures
from pev_mzi.scenarios import preset

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_PATH = ROOT / "fixtures" / "derived_values.csv"

_BOTH_MODE_CACHE = {}


@pytest.fixture(scope="session")
def derived():
    """Frozen oracle values keyed by name."""
    return read_fixtures(FIXTURE_PATH)


@pytest.fixture(scope="session")
def both_mode_report():
    """Run a preset once in ``both`` mode and keep only the report.

    The grid states are dropped so the whole session stays within a few
    hundred MB.
    """

    def get(name):
        if name not in _BOTH_MODE_CACHE:
            _, report = evaluate(preset(name), "both")
            _BOTH_MODE_CACHE[name] = report
        return _BOTH_MODE_CACHE[name]

    return get


def pytest_terminal_summary(terminalreporter):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when != "call":
                continue
            name = nodeid.split("::", 1)[1]
            number = int(name.split("_")[2])
            ok = results.get(number, (True, name))[0] and outcome == "passed"
            results[number] = (ok, name.split("[")[0])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, name = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  ({name})")


@pytest.fixture
def threads_env(monkeypatch):
    def set_threads(n):
        monkeypatch.setenv("PEV_MZI_THREADS", str(n))

    yield set_threads
    os.environ.pop("PEV_MZI_THREADS", None)
