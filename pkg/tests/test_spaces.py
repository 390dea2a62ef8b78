"""Norms, embedding constants, and the randomized inequality verifier."""

import dataclasses
import math

import numpy as np
import pytest

from fracham import (
    DomainError,
    EmbeddingConstants,
    EmbeddingViolation,
    GridFunction,
    PotentialSpec,
    ProblemSpec,
    RealLineGrid,
    c_infinity_grid_sharp,
    estimate_c_infinity,
    estimate_embedding_constants,
    extremal_profile,
    inner_x_lambda,
    norm_h_alpha,
    norm_x_lambda,
    quadratic_form_alpha,
    verify_embeddings,
)
from fracham.spaces import sample_interval_function, sample_line_function
from fracham import IntervalGrid


def test_extremal_profile_attains_grid_sharp_constant(line_grid):
    alpha = 0.75
    prof = extremal_profile(line_grid, alpha)
    ratio = float(np.max(np.abs(prof.values))) / norm_h_alpha(prof, alpha)
    sharp = c_infinity_grid_sharp(line_grid, alpha)
    assert abs(ratio - sharp) / sharp < 1e-12


def test_estimator_returns_grid_sharp_for_any_budget(line_grid):
    """Random draws corroborate but never exceed the deterministic profile."""
    alpha = 0.75
    sharp = c_infinity_grid_sharp(line_grid, alpha)
    for samples, seed in ((30, 1), (300, 99)):
        best, report = estimate_c_infinity(
            line_grid, alpha, samples=samples, rng=np.random.default_rng(seed)
        )
        assert best == report["per_family"]["extremal-profile"]
        assert abs(best - sharp) / sharp < 1e-12
        for name, value in report["per_family"].items():
            assert value <= best * (1.0 + 1e-12), name


def test_embedding_constants_internal_relations(constants, potential):
    csq_m = constants.c_infinity**2 * constants.meas_lc
    assert csq_m < 1.0
    assert abs(constants.theta - (1.0 - csq_m) / csq_m) < 1e-12 * constants.theta
    floor = 1.0 / (potential.c * csq_m)
    assert abs(constants.lambda_floor - floor) < 1e-12 * floor
    assert abs(constants.c_infinity - constants.safety * constants.c_infinity_raw) < 1e-15
    assert abs(constants.meas_lc - potential.sublevel_measure()) < 1e-15
    for p in (3.0, 4.0):
        k = constants.kappa(p)
        product = k**p * constants.theta ** (p / 2.0) * constants.meas_lc ** ((p - 2.0) / 2.0)
        assert abs(product - 1.0) < 1e-12


def test_constants_do_not_depend_on_sample_budget(line_grid, potential, constants):
    small = estimate_embedding_constants(line_grid, 0.75, potential, samples=120, seed=5)
    assert small.c_infinity == constants.c_infinity
    assert small.theta == constants.theta
    assert small.lambda_floor == constants.lambda_floor


def test_wide_well_is_rejected(line_grid):
    wide = PotentialSpec(varrho=5.0, delta=0.05, cap=6.0, c=1.5)
    with pytest.raises(DomainError):
        estimate_embedding_constants(line_grid, 0.75, wide, samples=50)


def test_tampered_constants_are_rejected(constants):
    with pytest.raises(DomainError):
        dataclasses.replace(constants, theta=2.0 * constants.theta)
    with pytest.raises(DomainError):
        dataclasses.replace(constants, lambda_floor=0.5 * constants.lambda_floor)


def test_weighted_inner_product_axioms(spec10):
    grid = spec10.grid
    rng = np.random.default_rng(20260816)
    u = GridFunction(grid, sample_line_function(grid, rng, 0))
    v = GridFunction(grid, sample_line_function(grid, rng, 1))
    w = GridFunction(grid, sample_line_function(grid, rng, 0))
    uv = inner_x_lambda(u, v, spec10)
    assert abs(uv - inner_x_lambda(v, u, spec10)) < 1e-12 * (1.0 + abs(uv))
    lin = inner_x_lambda(GridFunction(grid, 2.0 * u.values + w.values), v, spec10)
    assert abs(lin - 2.0 * uv - inner_x_lambda(w, v, spec10)) < 1e-10 * (1.0 + abs(lin))
    nu, nv = norm_x_lambda(u, spec10), norm_x_lambda(v, spec10)
    ns = norm_x_lambda(GridFunction(grid, u.values + v.values), spec10)
    assert ns <= nu + nv + 1e-12 * (nu + nv)
    assert abs(norm_x_lambda(GridFunction(grid, -3.0 * u.values), spec10) - 3.0 * nu) < 1e-10 * nu


def test_weighted_norm_grows_with_parameter(spec10):
    grid = spec10.grid
    t = grid.nodes
    u = GridFunction(grid, np.exp(-((t - 1.0) ** 2)))  # overlaps the positive set
    norms = [norm_x_lambda(u, spec10.with_lambda(lam)) for lam in (1.0, 10.0, 100.0)]
    assert norms[0] < norms[1] < norms[2]


def test_weighted_norm_reduces_on_the_well(setup, spec10):
    """A field supported where the potential vanishes sees no parameter term."""
    psi = setup.psi
    nsq = norm_x_lambda(psi, spec10) ** 2
    qf = quadratic_form_alpha(psi, spec10.alpha)
    assert abs(nsq - qf) < 1e-12 * qf
    assert norm_x_lambda(psi, spec10.with_lambda(1000.0)) == norm_x_lambda(psi, spec10)


def test_verify_embeddings_small_budget(spec10, constants):
    report = verify_embeddings(60, spec10, constants=constants, seed=3)
    assert report["passed"] is True
    for name, entry in report["inequalities"].items():
        assert entry["worst_ratio"] <= 1.0 + 1e-8, name
        assert entry["samples"] > 0, name


def test_verify_embeddings_rejects_parameter_below_floor(spec10, constants):
    low = spec10.with_lambda(0.5 * constants.lambda_floor)
    with pytest.raises(DomainError):
        verify_embeddings(10, low, constants=constants)


def test_verify_embeddings_flags_a_false_constant(spec10, constants):
    """An understated sup constant must surface as a violation with a sample."""
    fake_c = 0.2 * constants.c_infinity
    csq_m = fake_c**2 * constants.meas_lc
    fake = EmbeddingConstants(
        alpha=constants.alpha,
        c_infinity=fake_c,
        c_infinity_raw=fake_c / constants.safety,
        safety=constants.safety,
        meas_lc=constants.meas_lc,
        c_level=constants.c_level,
        theta=(1.0 - csq_m) / csq_m,
        lambda_floor=1.0 / (constants.c_level * csq_m),
        kappa_map=(),
        sample_count=0,
        seed=0,
    )
    with pytest.raises(EmbeddingViolation) as err:
        verify_embeddings(50, spec10.with_lambda(fake.lambda_floor), constants=fake, seed=3)
    assert err.value.detail["ratio"] > 1.0
    assert err.value.sample is not None


def test_interval_samples_vanish_at_endpoints():
    ig = IntervalGrid(-0.4, 0.4, 257)
    rng = np.random.default_rng(20260816)
    for fam in (0, 1):
        for _ in range(5):
            vals = sample_interval_function(ig, rng, fam)
            assert vals[0] == 0.0 and vals[-1] == 0.0


def test_norm_domain_checks(line_grid, spec10):
    ig = IntervalGrid(0.0, 1.0, 17)
    with pytest.raises(DomainError):
        norm_h_alpha(GridFunction(ig, np.zeros(17)), 0.75)
    other = RealLineGrid(10.0, 64)
    with pytest.raises(DomainError):
        inner_x_lambda(
            GridFunction(other, np.zeros(64)), GridFunction(other, np.zeros(64)), spec10
        )
    with pytest.raises(DomainError):
        sample_line_function(line_grid, np.random.default_rng(0), 7)
