"""Energy functionals, derivatives, metric representatives, and identities."""

import math

import numpy as np
import pytest

from fracham import (
    DomainError,
    GridFunction,
    IntervalGrid,
    IntervalProblemSpec,
    ProblemSpec,
    bvp_derivative_action,
    bvp_energy,
    bvp_gradient_rep,
    bvp_h_identity,
    derivative_action,
    energy,
    gradient_rep,
    h_identity,
    inner_x_lambda,
    norm_h_alpha,
    norm_x_lambda,
    quadratic_form_alpha,
    default_nonlinearity,
    default_potential,
)
from fracham.fracops import gl_matrix, interval_stiffness
from fracham.functional import _metric_iteration_budget
from fracham.problem import w_values
from fracham.spaces import sample_interval_function


def _decaying_field(grid, rng):
    """Random trig polynomial under a Gaussian envelope, so it decays at the box edge."""
    t = grid.nodes
    out = np.zeros_like(t)
    for _ in range(4):
        a, b, k = rng.normal(), rng.normal(), rng.uniform(0.3, 2.0)
        out += a * np.cos(k * t) + b * np.sin(k * t)
    return GridFunction(grid, out * np.exp(-(t * t) / 18.0))


def _interval_field(spec, rng):
    return GridFunction(spec.grid, sample_interval_function(spec.grid, rng, 1))


def test_problem_spec_validation(line_grid, potential, nonlin):
    for alpha in (0.5, 1.0, 1.3, 0.2):
        with pytest.raises(DomainError):
            ProblemSpec(alpha=alpha, lam=10.0, potential=potential,
                        nonlinearity=nonlin, grid=line_grid)
    for lam in (0.0, -2.0, math.inf):
        with pytest.raises(DomainError):
            ProblemSpec(alpha=0.75, lam=lam, potential=potential,
                        nonlinearity=nonlin, grid=line_grid)
    with pytest.raises(DomainError):
        ProblemSpec(alpha=0.75, lam=10.0, potential=potential,
                    nonlinearity=nonlin, grid=line_grid, n=0)
    ig = IntervalGrid(-0.4, 0.4, 65)
    with pytest.raises(DomainError):
        IntervalProblemSpec(alpha=0.4, nonlinearity=nonlin, grid=ig)
    with pytest.raises(DomainError):
        IntervalProblemSpec(alpha=0.75, nonlinearity=nonlin, grid=ig, n=0)


def test_with_lambda_changes_only_the_parameter(spec10):
    moved = spec10.with_lambda(250.0)
    assert moved.lam == 250.0
    assert moved.grid is spec10.grid
    assert moved.alpha == spec10.alpha and moved.potential == spec10.potential


def test_energy_assembles_norm_and_nonlinearity(spec10):
    rng = np.random.default_rng(20260816)
    u = _decaying_field(spec10.grid, rng)
    val = energy(u, spec10)
    intw = spec10.grid.integrate(
        w_values(spec10.nonlinearity, spec10.grid.nodes, u.values)
    )
    expected = 0.5 * norm_x_lambda(u, spec10) ** 2 - intw
    assert abs(val - expected) < 1e-12 * (1.0 + abs(val))


def test_energy_on_the_well_ignores_the_parameter(setup, spec10):
    psi = setup.psi
    intw = spec10.grid.integrate(
        w_values(spec10.nonlinearity, spec10.grid.nodes, psi.values)
    )
    closed = 0.5 * quadratic_form_alpha(psi, spec10.alpha) - intw
    val = energy(psi, spec10)
    assert abs(val - closed) < 1e-12 * (1.0 + abs(val))
    assert energy(psi, spec10.with_lambda(1.0)) == val
    assert energy(psi, spec10.with_lambda(1000.0)) == val


def test_derivative_matches_finite_differences(spec10, interval_spec):
    rng = np.random.default_rng(20260816)
    step = 1e-4
    for _ in range(5):
        u = _decaying_field(spec10.grid, rng)
        v = _decaying_field(spec10.grid, rng)
        action = derivative_action(u, v, spec10)
        up = GridFunction(spec10.grid, u.values + step * v.values)
        dn = GridFunction(spec10.grid, u.values - step * v.values)
        fd = (energy(up, spec10) - energy(dn, spec10)) / (2.0 * step)
        assert abs(action - fd) < 1e-6 * (1.0 + abs(fd))
    for _ in range(5):
        u = _interval_field(interval_spec, rng)
        v = _interval_field(interval_spec, rng)
        action = bvp_derivative_action(u, v, interval_spec)
        up = GridFunction(interval_spec.grid, u.values + step * v.values)
        dn = GridFunction(interval_spec.grid, u.values - step * v.values)
        fd = (bvp_energy(up, interval_spec) - bvp_energy(dn, interval_spec)) / (2.0 * step)
        assert abs(action - fd) < 1e-6 * (1.0 + abs(fd))


def test_gradient_defining_property_weighted_metric(spec10):
    rng = np.random.default_rng(3)
    u = _decaying_field(spec10.grid, rng)
    g = gradient_rep(u, spec10, metric="x-alpha-lambda", tol=1e-12)
    for _ in range(10):
        v = _decaying_field(spec10.grid, rng)
        lhs = inner_x_lambda(g, v, spec10)
        rhs = derivative_action(u, v, spec10)
        assert abs(lhs - rhs) < 1e-8 * (1.0 + abs(rhs))


def test_gradient_defining_property_native_metric(spec10):
    rng = np.random.default_rng(4)
    u = _decaying_field(spec10.grid, rng)
    g = gradient_rep(u, spec10, metric="h-alpha")
    alpha = spec10.alpha
    for _ in range(10):
        v = _decaying_field(spec10.grid, rng)
        plus = GridFunction(spec10.grid, g.values + v.values)
        minus = GridFunction(spec10.grid, g.values - v.values)
        lhs = 0.25 * (norm_h_alpha(plus, alpha) ** 2 - norm_h_alpha(minus, alpha) ** 2)
        rhs = derivative_action(u, v, spec10)
        assert abs(lhs - rhs) < 1e-8 * (1.0 + abs(rhs))


def test_unknown_metric_is_rejected(spec10):
    u = GridFunction.zeros(spec10.grid)
    with pytest.raises(DomainError):
        gradient_rep(u, spec10, metric="sobolev")


def test_defect_identity_on_random_fields(spec10):
    rng = np.random.default_rng(5)
    for _ in range(5):
        u = _decaying_field(spec10.grid, rng)
        lhs, rhs, gap = h_identity(u, spec10)
        assert gap <= 1e-10 * (1.0 + abs(lhs))
        assert rhs >= -1e-12


def test_gradient_steps_downhill(spec10):
    rng = np.random.default_rng(6)
    u = _decaying_field(spec10.grid, rng)
    base = energy(u, spec10)
    for metric in ("h-alpha", "x-alpha-lambda"):
        g = gradient_rep(u, spec10, metric=metric)
        scale = 1e-3 / (1.0 + norm_x_lambda(g, spec10))
        trial = GridFunction(spec10.grid, u.values - scale * g.values)
        assert energy(trial, spec10) < base


def test_metric_solve_budget_scaling(spec10):
    small = _metric_iteration_budget(spec10.with_lambda(1.0), 1e-10, 40)
    large = _metric_iteration_budget(spec10.with_lambda(1e6), 1e-10, 40)
    assert large > small > 40
    assert _metric_iteration_budget(spec10, 1e-10, 10**6) == 10**6


def test_interval_boundary_enforcement(interval_spec):
    bad = GridFunction(interval_spec.grid, np.ones(interval_spec.grid.num_points))
    with pytest.raises(DomainError):
        bvp_energy(bad, interval_spec)
    other = GridFunction(IntervalGrid(-0.4, 0.4, 33), np.zeros(33))
    with pytest.raises(DomainError):
        bvp_energy(other, interval_spec)


def test_interval_gradient_defining_property(interval_spec):
    rng = np.random.default_rng(8)
    u = _interval_field(interval_spec, rng)
    g = bvp_gradient_rep(u, interval_spec)
    b = gl_matrix(interval_spec.grid, interval_spec.alpha)
    h = interval_spec.grid.spacing
    for _ in range(5):
        v = _interval_field(interval_spec, rng)
        lhs = h * float(np.sum((b @ g.values) * (b @ v.values)))
        rhs = bvp_derivative_action(u, v, interval_spec)
        assert abs(lhs - rhs) < 1e-10 * (1.0 + abs(rhs))


def test_interval_defect_identity(interval_spec):
    rng = np.random.default_rng(9)
    u = _interval_field(interval_spec, rng)
    lhs, rhs, gap = bvp_h_identity(u, interval_spec)
    assert gap <= 1e-10 * (1.0 + abs(lhs))


def test_cross_domain_quadratic_forms(line_grid):
    """Restricting to the interval loses energy; refinement recovers it from below."""
    alpha = 0.75
    tau = 0.25

    def bump(x):
        out = np.zeros_like(x)
        inside = np.abs(x) < tau
        out[inside] = np.exp(-1.0 / (1.0 - (x[inside] / tau) ** 2))
        return out

    qf_line = quadratic_form_alpha(GridFunction(line_grid, bump(line_grid.nodes)), alpha)
    previous = -np.inf
    for num_points in (257, 513, 1025, 2049):
        ig = IntervalGrid(-0.4, 0.4, num_points)
        vals = bump(ig.nodes)
        vals[0] = vals[-1] = 0.0
        interior = vals[1:-1]
        a = np.asarray(interval_stiffness(ig, alpha))
        qf_int = float(interior @ (a @ interior))
        assert qf_int < qf_line
        assert (qf_line - qf_int) / qf_line < 0.01
        assert qf_int > previous
        previous = qf_int
