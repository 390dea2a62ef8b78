"""Experiment orchestration: concentration sweeps, verification campaigns, I/O.

The sweep is the package's headline experiment: solve the Dirichlet interval
problem once, then solve the line problem along an ascending ladder of
parameter values (warm-starting each run from the previous solution), and
record how the solution's mass localizes on the well and how far it sits from
the interval solution.  Both observables are required to decrease strictly
across converged records; the magnitudes themselves are reported, never
asserted against invented targets.
"""

from __future__ import annotations

import dataclasses
import datetime
import hashlib
import json
import math
import os

import numpy as np

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    EmbeddingViolation,
    MonotonicityError,
)
from .functional import (
    IntervalProblemSpec,
    ProblemSpec,
    _energy_raw,
    _ipartials,
    _xnormsq_raw,
    bvp_derivative_action,
    bvp_energy,
    bvp_h_identity,
    derivative_action,
    energy,
    h_identity,
)
from .grids import GridFunction, IntervalGrid, RealLineGrid
from .mpa import (
    MpaConfig,
    SolveResult,
    bvp_solve,
    construct_e,
    ctilde_bound,
    mpa_solve,
)
from .problem import grad_w_values, validate_nonlinearity, validate_potential
from .spaces import (
    EmbeddingConstants,
    estimate_embedding_constants,
    norm_h_alpha,
    norm_x_lambda,
    sample_interval_function,
    sample_line_function,
    verify_embeddings,
)

__all__ = [
    "SweepReport",
    "tail_mass_ratio",
    "embed_interval_solution",
    "dist_h_alpha",
    "bvp_el_residual",
    "lambda_sweep",
    "run_verification_campaign",
    "write_solve_outputs",
    "write_report",
    "canonical_json",
    "payload_hash",
]


# ---------------------------------------------------------------------------
# Canonical serialization.
# ---------------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def canonical_json(payload) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, finite floats only."""
    return (
        json.dumps(payload, sort_keys=True, indent=2, allow_nan=False, default=_json_default)
        + "\n"
    )


def payload_hash(payload) -> str:
    """Short content hash of a JSON-serializable payload."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[:16]


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Concentration observables.
# ---------------------------------------------------------------------------


def tail_mass_ratio(u: GridFunction, varrho: float) -> float:
    """Fraction of the squared L2 mass lying outside ``[-varrho, varrho]``."""
    if not isinstance(u.grid, RealLineGrid):
        raise DomainError("tail_mass_ratio expects a real-line grid function")
    if varrho <= 0:
        raise DomainError(f"varrho must be positive, got {varrho}")
    density = np.sum(u.values**2, axis=1)
    total = float(np.sum(density))
    if total == 0.0:
        raise DomainError("tail mass ratio is undefined for the zero function")
    outside = float(np.sum(density[np.abs(u.grid.nodes) > varrho]))
    return min(max(outside / total, 0.0), 1.0)


def embed_interval_solution(u: GridFunction, line_grid: RealLineGrid) -> GridFunction:
    """Zero-extend an interval grid function onto a real-line grid.

    Values are aligned by linear interpolation between interval nodes and are
    exactly zero outside the interval; the alignment error is O(h).
    """
    if not isinstance(u.grid, IntervalGrid):
        raise DomainError("embed_interval_solution expects an interval grid function")
    src_t = u.grid.nodes
    dst_t = line_grid.nodes
    cols = [
        np.interp(dst_t, src_t, u.values[:, j], left=0.0, right=0.0)
        for j in range(u.num_components)
    ]
    out = np.stack(cols, axis=1)
    out[(dst_t < src_t[0]) | (dst_t > src_t[-1])] = 0.0
    return GridFunction(line_grid, out)


def dist_h_alpha(u: GridFunction, u_interval: GridFunction, alpha: float) -> float:
    """Base-norm distance between a line function and an embedded interval one."""
    emb = embed_interval_solution(u_interval, u.grid)
    if emb.num_components != u.num_components:
        raise DomainError("component counts differ")
    return norm_h_alpha(GridFunction(u.grid, u.values - emb.values), alpha)


def bvp_el_residual(u: GridFunction, spec: IntervalProblemSpec) -> float:
    """Euclidean norm of the discrete stationarity residual at interior nodes."""
    return float(np.linalg.norm(_ipartials(u.values, spec)))


# ---------------------------------------------------------------------------
# The sweep.
# ---------------------------------------------------------------------------


@dataclasses.dataclass(eq=False)
class SweepReport:
    """Everything one concentration sweep produced."""

    records: list[dict]
    bvp_reference: SolveResult
    bvp_el_residual: float
    ctilde: float
    rho: float
    eta: float
    sigma0: float
    lambda_floor: float
    alignment_error: float
    observed_admissible_lambda: float | None
    config_hash: str

    def to_dict(self, include_values: bool = False) -> dict:
        return {
            "records": self.records,
            "bvp_reference": self.bvp_reference.to_dict(include_values=include_values),
            "bvp_el_residual": self.bvp_el_residual,
            "ctilde": self.ctilde,
            "rho": self.rho,
            "eta": self.eta,
            "sigma0": self.sigma0,
            "lambda_floor": self.lambda_floor,
            "alignment_error": self.alignment_error,
            "observed_admissible_lambda": self.observed_admissible_lambda,
            "config_hash": self.config_hash,
        }


def _c6_record(u: GridFunction, spec: ProblemSpec) -> dict:
    """Both sides of the critical-point identity ``||u||_X^2 = (grad W, u)``."""
    lhs = norm_x_lambda(u, spec) ** 2
    rhs = float(
        spec.grid.integrate(
            grad_w_values(spec.nonlinearity, spec.grid.nodes, u.values) * u.values
        )
    )
    gap = abs(lhs - rhs)
    tol = 1e-6 * (1.0 + lhs)
    return {"c6_lhs": lhs, "c6_rhs": rhs, "c6_gap": gap, "c6_tol": tol, "c6_ok": gap <= tol}


def lambda_sweep(
    base_spec: ProblemSpec,
    lambdas,
    mpa_config: MpaConfig | None = None,
    bvp_points: int = 257,
    bvp_config: MpaConfig | None = None,
    cold: bool = False,
    constants: EmbeddingConstants | None = None,
    config_hash: str | None = None,
) -> SweepReport:
    """Solve along an ascending parameter ladder and track concentration.

    The interval reference is solved once; each line run is warm-started from
    the previous converged solution unless ``cold``.  Converged records must
    keep their level inside the certified chain ``[eta - tol, ctilde + tol]``
    and both concentration observables must decrease strictly.
    """
    lambdas = [float(x) for x in lambdas]
    if len(lambdas) == 0:
        raise ConfigError("lambda ladder is empty")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ConfigError(f"lambda ladder must be strictly increasing, got {lambdas}")
    if mpa_config is None:
        mpa_config = MpaConfig()
    if constants is None:
        constants = estimate_embedding_constants(
            base_spec.grid, base_spec.alpha, base_spec.potential
        )
    floor = constants.lambda_floor
    below = [x for x in lambdas if x < floor * (1.0 - 1e-12)]
    if below:
        raise DomainError(
            f"lambda values {below} lie below the admissibility floor {floor:.6g}"
        )

    spec0 = base_spec.with_lambda(lambdas[0])
    setup = construct_e(spec0, constants=constants)
    ctilde = ctilde_bound(setup, spec0)

    varrho = base_spec.potential.varrho
    igrid = IntervalGrid(-varrho, varrho, bvp_points)
    ispec = IntervalProblemSpec(
        alpha=base_spec.alpha,
        nonlinearity=base_spec.nonlinearity,
        grid=igrid,
        n=base_spec.n,
    )
    if bvp_config is None:
        bvp_config = MpaConfig(metric="h-alpha", tol=1e-8)
    bvp_ref = bvp_solve(ispec, bvp_config)
    bvp_el = bvp_el_residual(bvp_ref.u, ispec)

    if config_hash is None:
        config_hash = payload_hash(
            {
                "alpha": base_spec.alpha,
                "n": base_spec.n,
                "grid": dataclasses.asdict(base_spec.grid),
                "potential": dataclasses.asdict(base_spec.potential),
                "nonlinearity": dataclasses.asdict(base_spec.nonlinearity),
                "lambdas": lambdas,
                "cold": cold,
                "mpa": dataclasses.asdict(mpa_config),
                "bvp_points": bvp_points,
            }
        )

    records: list[dict] = []
    level_tol = 1e-6 * (1.0 + abs(ctilde))
    prev_u: GridFunction | None = None
    for lam in lambdas:
        spec = base_spec.with_lambda(lam)
        guess = None if cold else prev_u
        result = mpa_solve(spec, setup, mpa_config, initial_guess=guess)
        record = {
            "lambda": lam,
            "level": result.level,
            "residual": result.residual,
            "residual_weighted": result.residual_weighted,
            "iterations": result.iterations,
            "converged": result.converged,
            "norm_x": result.norm_x,
            "tail_mass_ratio": tail_mass_ratio(result.u, varrho),
            "dist_to_bvp_h_alpha": dist_h_alpha(result.u, bvp_ref.u, base_spec.alpha),
        }
        record.update(_c6_record(result.u, spec))
        _, _, id_gap = h_identity(result.u, spec)
        record["identity_gap"] = id_gap
        record["identity_ok"] = id_gap <= 1e-6 * (1.0 + abs(result.level))
        if result.converged:
            if result.level > ctilde + level_tol:
                raise ConvergenceError(
                    f"level {result.level:.9g} at lambda={lam} exceeds the ray "
                    f"bound {ctilde:.9g}; the polyline is not an admissible path",
                )
            if result.level < setup.eta - 1e-8:
                raise ConvergenceError(
                    f"level {result.level:.9g} at lambda={lam} fell below the "
                    f"sphere floor {setup.eta:.9g}; the path collapsed",
                )
            prev_u = result.u
        records.append(record)

    if not any(r["converged"] for r in records):
        raise ConvergenceError("no ladder value converged; sweep has no usable records")

    converged = [r for r in records if r["converged"]]
    for prev, cur in zip(converged, converged[1:]):
        if not (cur["tail_mass_ratio"] < prev["tail_mass_ratio"]):
            raise MonotonicityError(
                "tail mass ratio failed to decrease strictly",
                detail={"previous": prev, "current": cur},
            )
        if not (cur["dist_to_bvp_h_alpha"] < prev["dist_to_bvp_h_alpha"]):
            raise MonotonicityError(
                "distance to the interval solution failed to decrease strictly",
                detail={"previous": prev, "current": cur},
            )

    observed = None
    for r in records:
        if r["converged"] and r["c6_ok"] and r["identity_ok"]:
            observed = r["lambda"]
            break

    return SweepReport(
        records=records,
        bvp_reference=bvp_ref,
        bvp_el_residual=bvp_el,
        ctilde=ctilde,
        rho=setup.rho,
        eta=setup.eta,
        sigma0=setup.sigma0,
        lambda_floor=floor,
        alignment_error=max(base_spec.grid.spacing, igrid.spacing),
        observed_admissible_lambda=observed,
        config_hash=config_hash,
    )


# ---------------------------------------------------------------------------
# Verification campaign.
# ---------------------------------------------------------------------------

DEFAULT_BUDGETS = {
    "embedding_samples": 1000,
    "nonlinearity_samples": 20000,
    "derivative_checks": 50,
    "sphere_samples": 200,
}


def _random_line_field(grid: RealLineGrid, rng: np.random.Generator, n: int) -> np.ndarray:
    cols = [sample_line_function(grid, rng, int(rng.integers(0, 3))) for _ in range(n)]
    return np.stack(cols, axis=1)


def _random_interval_field(
    grid: IntervalGrid, rng: np.random.Generator, n: int
) -> np.ndarray:
    cols = [sample_interval_function(grid, rng, int(rng.integers(0, 2))) for _ in range(n)]
    return np.stack(cols, axis=1)


def _normalized(vals: np.ndarray, grid, alpha: float) -> np.ndarray:
    nrm = norm_h_alpha(GridFunction(grid, vals), alpha)
    if nrm == 0.0:
        return vals
    return vals / nrm


def _fd_action_errors(spec: ProblemSpec, count: int, rng: np.random.Generator) -> dict:
    """Central finite differences of the energy against derivative_action."""
    grid = spec.grid
    eps = 1e-5
    worst = 0.0
    for _ in range(count):
        uv = _normalized(_random_line_field(grid, rng, spec.n), grid, spec.alpha)
        vv = _normalized(_random_line_field(grid, rng, spec.n), grid, spec.alpha)
        u = GridFunction(grid, uv)
        v = GridFunction(grid, vv)
        act = derivative_action(u, v, spec)
        fd = (
            energy(GridFunction(grid, uv + eps * vv), spec)
            - energy(GridFunction(grid, uv - eps * vv), spec)
        ) / (2.0 * eps)
        worst = max(worst, abs(fd - act) / (1.0 + abs(act)))
    return {"count": count, "worst_rel_err": worst, "passed": worst <= 1e-6}


def _fd_interval_errors(
    spec: IntervalProblemSpec, count: int, rng: np.random.Generator
) -> dict:
    grid = spec.grid
    eps = 1e-5
    worst = 0.0
    for _ in range(count):
        uv = _random_interval_field(grid, rng, spec.n)
        vv = _random_interval_field(grid, rng, spec.n)
        scale = max(float(np.max(np.abs(uv))), 1e-12)
        uv = uv / scale
        vv = vv / max(float(np.max(np.abs(vv))), 1e-12)
        u = GridFunction(grid, uv)
        v = GridFunction(grid, vv)
        act = bvp_derivative_action(u, v, spec)
        fd = (
            bvp_energy(GridFunction(grid, uv + eps * vv), spec)
            - bvp_energy(GridFunction(grid, uv - eps * vv), spec)
        ) / (2.0 * eps)
        worst = max(worst, abs(fd - act) / (1.0 + abs(act)))
    return {"count": count, "worst_rel_err": worst, "passed": worst <= 1e-6}


def _identity_spot_checks(
    spec: ProblemSpec, ispec: IntervalProblemSpec, rng: np.random.Generator, count: int = 5
) -> dict:
    worst = 0.0
    for _ in range(count):
        uv = _normalized(_random_line_field(spec.grid, rng, spec.n), spec.grid, spec.alpha)
        lhs, _, gap = h_identity(GridFunction(spec.grid, uv), spec)
        worst = max(worst, gap / (1.0 + abs(lhs)))
        iv = _random_interval_field(ispec.grid, rng, ispec.n)
        lhs, _, gap = bvp_h_identity(GridFunction(ispec.grid, iv), ispec)
        worst = max(worst, gap / (1.0 + abs(lhs)))
    return {"count": count, "worst_rel_gap": worst, "passed": worst <= 1e-10}


def _geometry_checks(
    spec: ProblemSpec,
    constants: EmbeddingConstants,
    count: int,
    rng: np.random.Generator,
) -> dict:
    setup = construct_e(spec, constants=constants)
    floor_min = math.inf
    for _ in range(count):
        vals = _random_line_field(spec.grid, rng, spec.n)
        nx = math.sqrt(max(_xnormsq_raw(vals, spec), 0.0))
        if nx == 0.0:
            continue
        scaled = (setup.rho / nx) * vals
        floor_min = min(floor_min, _energy_raw(scaled, spec))
    sphere_ok = floor_min >= setup.eta - 1e-8
    endpoint_ok = _energy_raw(setup.e.values, spec) < 0.0
    ray = [
        _energy_raw(s * setup.sigma0 * setup.psi.values, spec) for s in (1.0, 2.0, 4.0)
    ]
    trend_ok = ray[0] > ray[1] > ray[2]
    other = construct_e(spec.with_lambda(1000.0 * spec.lam), constants=constants)
    sigma_invariant = other.sigma0 == setup.sigma0
    passed = sphere_ok and endpoint_ok and trend_ok and sigma_invariant
    return {
        "sphere_samples": count,
        "sphere_min_energy": floor_min,
        "eta": setup.eta,
        "rho": setup.rho,
        "sigma0": setup.sigma0,
        "sphere_ok": sphere_ok,
        "endpoint_energy_negative": endpoint_ok,
        "ray_energies": ray,
        "ray_decreasing": trend_ok,
        "sigma0_parameter_invariant": sigma_invariant,
        "passed": passed,
    }


def run_verification_campaign(
    spec: ProblemSpec,
    budgets: dict | None = None,
    seed: int = 20260816,
    constants: EmbeddingConstants | None = None,
) -> dict:
    """Run every verifier the package ships and aggregate one report.

    ``budgets`` caps the sample counts per section; a section with a zero
    budget is skipped entirely, so an all-zero campaign is trivially passing.
    """
    merged = dict(DEFAULT_BUDGETS)
    merged.update(budgets or {})
    unknown = set(merged) - set(DEFAULT_BUDGETS)
    if unknown:
        raise ConfigError(f"unknown budget keys: {sorted(unknown)}")
    sections: dict[str, dict] = {}

    needs_constants = merged["embedding_samples"] > 0 or merged["sphere_samples"] > 0
    if needs_constants and constants is None:
        constants = estimate_embedding_constants(
            spec.grid,
            spec.alpha,
            spec.potential,
            samples=max(merged["embedding_samples"], 100),
            seed=seed,
        )

    if merged["embedding_samples"] > 0:
        try:
            sections["embeddings"] = verify_embeddings(
                merged["embedding_samples"], spec, constants=constants, seed=seed
            )
        except EmbeddingViolation as exc:
            sections["embeddings"] = {"passed": False, "violation": str(exc), "detail": exc.detail}
        sections["potential"] = validate_potential(
            spec.potential, c_infinity=constants.c_infinity
        )

    if merged["nonlinearity_samples"] > 0:
        sections["nonlinearity"] = validate_nonlinearity(
            spec.nonlinearity, sample_budget=merged["nonlinearity_samples"], seed=seed
        )

    if merged["derivative_checks"] > 0:
        rng = np.random.default_rng(seed)
        igrid = IntervalGrid(-spec.potential.varrho, spec.potential.varrho, 257)
        ispec = IntervalProblemSpec(
            alpha=spec.alpha, nonlinearity=spec.nonlinearity, grid=igrid, n=spec.n
        )
        fd_line = _fd_action_errors(spec, merged["derivative_checks"], rng)
        fd_int = _fd_interval_errors(ispec, merged["derivative_checks"], rng)
        ident = _identity_spot_checks(spec, ispec, rng)
        sections["functional"] = {
            "derivative_line": fd_line,
            "derivative_interval": fd_int,
            "defect_identity": ident,
            "passed": fd_line["passed"] and fd_int["passed"] and ident["passed"],
        }

    if merged["sphere_samples"] > 0:
        rng = np.random.default_rng(seed + 1)
        sections["geometry"] = _geometry_checks(
            spec, constants, merged["sphere_samples"], rng
        )

    passed = all(s.get("passed", False) for s in sections.values()) if sections else True
    return {"seed": seed, "budgets": merged, "sections": sections, "passed": passed}


# ---------------------------------------------------------------------------
# Persistence.
# ---------------------------------------------------------------------------


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_solve_outputs(
    outdir: str,
    result: SolveResult,
    extras: dict | None = None,
    include_values: bool = True,
) -> dict:
    """Write result.json, u.csv, trace.csv into a run directory."""
    os.makedirs(outdir, exist_ok=True)
    payload = result.to_dict(include_values=include_values)
    if extras:
        payload.update(extras)
    payload["generated_at"] = _timestamp()
    result_path = os.path.join(outdir, "result.json")
    _write_text(result_path, canonical_json(payload))

    mag = result.u.euclidean_magnitude()
    t = result.u.grid.nodes
    lines = ["t,abs_u"]
    lines += [f"{float(ti)!r},{float(vi)!r}" for ti, vi in zip(t, mag)]
    u_path = os.path.join(outdir, "u.csv")
    _write_text(u_path, "\n".join(lines) + "\n")

    rows = ["iteration,level,residual,residual_weighted"]
    for i, (level, res, resw) in enumerate(result.trace, start=1):
        rows.append(f"{i},{float(level)!r},{float(res)!r},{float(resw)!r}")
    trace_path = os.path.join(outdir, "trace.csv")
    _write_text(trace_path, "\n".join(rows) + "\n")
    return {"result": result_path, "u": u_path, "trace": trace_path}


def write_report(outdir: str, name: str, payload: dict) -> str:
    """Write one canonical-JSON report file; returns its path."""
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    _write_text(path, canonical_json(payload))
    return path


def write_sweep_csv(outdir: str, report: SweepReport) -> str:
    """Columnar summary of a sweep's records."""
    os.makedirs(outdir, exist_ok=True)
    cols = [
        "lambda",
        "level",
        "residual",
        "residual_weighted",
        "converged",
        "iterations",
        "tail_mass_ratio",
        "dist_to_bvp_h_alpha",
        "c6_gap",
    ]
    lines = [",".join(cols)]
    for rec in report.records:
        cells = []
        for c in cols:
            v = rec[c]
            if isinstance(v, bool):
                cells.append(str(int(v)))
            elif isinstance(v, float):
                cells.append(repr(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    path = os.path.join(outdir, "sweep.csv")
    _write_text(path, "\n".join(lines) + "\n")
    return path
