"""Declarative run configuration: schema, defaults, loading, builders.

One JSON document drives the CLI.  Every key has a default, so a config file
only lists overrides; unknown keys are rejected rather than ignored, because
a silently dropped override is the worst failure mode a config system can
have.  The schema is versioned through ``schema_version``.
"""

from __future__ import annotations

import copy
import json

from .errors import ConfigError
from .functional import IntervalProblemSpec, ProblemSpec
from .grids import IntervalGrid, RealLineGrid
from .mpa import MpaConfig
from .problem import NonlinearitySpec, PotentialSpec
from .runner import payload_hash

__all__ = [
    "SCHEMA_VERSION",
    "DEFAULT_CONFIG",
    "load_config",
    "merge_config",
    "config_hash",
    "build_grid",
    "build_potential",
    "build_nonlinearity",
    "build_problem_spec",
    "build_interval_spec",
    "build_mpa_config",
    "build_bvp_config",
]

SCHEMA_VERSION = 1

DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "seed": 20260816,
    "grid": {
        "halfwidth": 20.0,
        "num_points": 4096,
    },
    "problem": {
        "alpha": 0.75,
        "lambda": 10.0,
        "n": 1,
        "potential": {
            "kind": "scalar",
            "varrho": 0.4,
            "delta": 0.05,
            "cap": 6.0,
            "c": 1.5,
            "diag_scales": [],
        },
        "nonlinearity": {
            "kind": "pure_power",
            "p": 4.0,
            "epsilon": 0.0,
            "weight_base": 1.0,
            "weight_amp": 0.0,
            "weight_freq": 0.0,
            "c0": 20.0,
            "radius": 1.0,
        },
    },
    "embedding": {
        "samples": 10000,
        "safety": 1.1,
    },
    "mpa": {
        "path_nodes": 21,
        "tol": 1e-6,
        "max_iters": 400,
        "step_rule": "armijo",
        "metric": "x-alpha-lambda",
        "polish": True,
        "max_path_nodes": 81,
        "restarts": 0,
    },
    "bvp": {
        "num_points": 257,
        "tol": 1e-8,
        "max_iters": 400,
    },
    "sweep": {
        "lambdas": [1.0, 10.0, 100.0, 1000.0],
        "cold": False,
    },
    "verify": {
        "embedding_samples": 1000,
        "nonlinearity_samples": 20000,
        "derivative_checks": 50,
        "sphere_samples": 200,
    },
}


def merge_config(base: dict, override: dict, path: str = "") -> dict:
    """Recursive merge of an override onto defaults, rejecting unknown keys."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be a table")
            out[key] = merge_config(base[key], value, where)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None = None) -> dict:
    """Effective configuration: defaults overlaid with one optional JSON file."""
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            user = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config file must contain a JSON object")
    merged = merge_config(DEFAULT_CONFIG, user)
    if merged["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {merged['schema_version']}; "
            f"this build reads version {SCHEMA_VERSION}"
        )
    return merged


def config_hash(cfg: dict) -> str:
    """Content hash of the effective configuration."""
    return payload_hash(cfg)


def build_grid(cfg: dict) -> RealLineGrid:
    g = cfg["grid"]
    return RealLineGrid(halfwidth=float(g["halfwidth"]), num_points=int(g["num_points"]))


def build_potential(cfg: dict) -> PotentialSpec:
    p = cfg["problem"]["potential"]
    return PotentialSpec(
        varrho=float(p["varrho"]),
        delta=float(p["delta"]),
        cap=float(p["cap"]),
        c=float(p["c"]),
        kind=str(p["kind"]),
        diag_scales=tuple(float(x) for x in p["diag_scales"]),
    )


def build_nonlinearity(cfg: dict) -> NonlinearitySpec:
    w = cfg["problem"]["nonlinearity"]
    return NonlinearitySpec(
        kind=str(w["kind"]),
        p=float(w["p"]),
        epsilon=float(w["epsilon"]),
        weight_base=float(w["weight_base"]),
        weight_amp=float(w["weight_amp"]),
        weight_freq=float(w["weight_freq"]),
        c0=float(w["c0"]) if w["c0"] is not None else None,
        radius=float(w["radius"]),
    )


def build_problem_spec(cfg: dict, lam: float | None = None) -> ProblemSpec:
    prob = cfg["problem"]
    return ProblemSpec(
        alpha=float(prob["alpha"]),
        lam=float(prob["lambda"]) if lam is None else float(lam),
        potential=build_potential(cfg),
        nonlinearity=build_nonlinearity(cfg),
        grid=build_grid(cfg),
        n=int(prob["n"]),
    )


def build_interval_spec(cfg: dict) -> IntervalProblemSpec:
    varrho = float(cfg["problem"]["potential"]["varrho"])
    grid = IntervalGrid(-varrho, varrho, int(cfg["bvp"]["num_points"]))
    return IntervalProblemSpec(
        alpha=float(cfg["problem"]["alpha"]),
        nonlinearity=build_nonlinearity(cfg),
        grid=grid,
        n=int(cfg["problem"]["n"]),
    )


def build_mpa_config(cfg: dict) -> MpaConfig:
    m = cfg["mpa"]
    return MpaConfig(
        path_nodes=int(m["path_nodes"]),
        tol=float(m["tol"]),
        max_iters=int(m["max_iters"]),
        step_rule=str(m["step_rule"]),
        metric=str(m["metric"]),
        polish=bool(m["polish"]),
        max_path_nodes=int(m["max_path_nodes"]),
        restarts=int(m["restarts"]),
        seed=int(cfg["seed"]),
    )


def build_bvp_config(cfg: dict) -> MpaConfig:
    b = cfg["bvp"]
    return MpaConfig(
        tol=float(b["tol"]),
        max_iters=int(b["max_iters"]),
        metric="h-alpha",
        seed=int(cfg["seed"]),
    )
