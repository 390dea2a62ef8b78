"""Shared fixtures: the default problem instance, solved once per session.

The expensive objects (embedding constants, geometry, the default solve, the
interval reference, the four-rung sweep) are session-scoped so every test
module reuses the same computation.
"""

import re

import pytest

from fracham import (
    IntervalGrid,
    IntervalProblemSpec,
    MpaConfig,
    ProblemSpec,
    RealLineGrid,
    bvp_solve,
    construct_e,
    ctilde_bound,
    default_nonlinearity,
    default_oscillatory,
    default_potential,
    estimate_embedding_constants,
    lambda_sweep,
    mpa_solve,
)

SEED = 20260816


@pytest.fixture(scope="session")
def line_grid():
    return RealLineGrid(halfwidth=20.0, num_points=4096)


@pytest.fixture(scope="session")
def potential():
    return default_potential()


@pytest.fixture(scope="session")
def nonlin():
    return default_nonlinearity()


@pytest.fixture(scope="session")
def spec10(line_grid, potential, nonlin):
    return ProblemSpec(
        alpha=0.75, lam=10.0, potential=potential, nonlinearity=nonlin, grid=line_grid
    )


@pytest.fixture(scope="session")
def constants(line_grid, potential):
    return estimate_embedding_constants(line_grid, 0.75, potential, samples=1000, seed=SEED)


@pytest.fixture(scope="session")
def setup(spec10, constants):
    return construct_e(spec10, constants=constants)


@pytest.fixture(scope="session")
def ctilde(setup, spec10):
    return float(ctilde_bound(setup, spec10))


@pytest.fixture(scope="session")
def default_solve(spec10, setup):
    return mpa_solve(spec10, setup)


@pytest.fixture(scope="session")
def interval_grid(potential):
    return IntervalGrid(-potential.varrho, potential.varrho, 257)


@pytest.fixture(scope="session")
def interval_spec(interval_grid, nonlin):
    return IntervalProblemSpec(alpha=0.75, nonlinearity=nonlin, grid=interval_grid)


@pytest.fixture(scope="session")
def bvp_result(interval_spec):
    return bvp_solve(interval_spec, MpaConfig(metric="h-alpha", tol=1e-8))


@pytest.fixture(scope="session")
def osc_spec(line_grid, potential):
    return ProblemSpec(
        alpha=0.75,
        lam=10.0,
        potential=potential,
        nonlinearity=default_oscillatory(),
        grid=line_grid,
    )


@pytest.fixture(scope="session")
def osc_solve(osc_spec, constants):
    osc_setup = construct_e(osc_spec, constants=constants)
    return osc_setup, mpa_solve(osc_spec, osc_setup)


@pytest.fixture(scope="session")
def sweep_report(spec10, constants):
    return lambda_sweep(spec10, [1.0, 10.0, 100.0, 1000.0], constants=constants)


_CRITERION_ID = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion test."""
    outcomes = {}
    for category, flag in (
        ("passed", "PASS"),
        ("failed", "FAIL"),
        ("error", "FAIL"),
        ("skipped", "FAIL"),
    ):
        for report in terminalreporter.stats.get(category, []):
            match = _CRITERION_ID.search(getattr(report, "nodeid", "") or "")
            if match is None:
                continue
            k = int(match.group(1))
            if flag == "FAIL" or k not in outcomes:
                outcomes[k] = flag
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(outcomes):
        terminalreporter.write_line(f"CRITERION {k}: {outcomes[k]}")
