"""Shared fixtures and the acceptance-criteria result registry.

The full reference integrations (10 well-mixed runs at t_end = 200 and
11 diffusive runs at t_end = 100) execute once per session here and are
shared by the acceptance gate and the invariant tests.

Acceptance tests call :func:`record_acceptance` before asserting; the
collected lines are printed as a terminal section at the end of the
run, one pass/fail line per criterion check.
"""

import time

import pytest

from sisrd import tables
from sisrd.experiments import config_for_set, run_simulation


@pytest.fixture(scope="session")
def ode_runs():
    """label -> (SimulationResult, wall seconds) for every ODE reference set."""
    runs = {}
    for row in tables.all_sets():
        if row.mode != tables.ODE:
            continue
        start = time.perf_counter()
        result = run_simulation(config_for_set(row))
        runs[row.label] = (result, time.perf_counter() - start)
    return runs


@pytest.fixture(scope="session")
def pde_runs():
    """label -> (SimulationResult, wall seconds) for every PDE reference set."""
    runs = {}
    for row in tables.all_sets():
        if row.mode != tables.PDE:
            continue
        start = time.perf_counter()
        result = run_simulation(config_for_set(row))
        runs[row.label] = (result, time.perf_counter() - start)
    return runs


ACCEPTANCE_RESULTS = []


def record_acceptance(criterion: int, label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((criterion, label, bool(passed), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, label, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {criterion:>2} [{label}] {status}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
    failed = sum(1 for item in ACCEPTANCE_RESULTS if not item[2])
    total = len(ACCEPTANCE_RESULTS)
    terminalreporter.write_line(f"acceptance checks: {total - failed}/{total} passed")
