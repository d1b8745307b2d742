"""Run configuration: a JSON document describing one problem and command options.

Schema (all keys optional unless the command needs them)::

    {
      "matrix":      {"type": "dirichlet", "n": 3}
                   | {"type": "dense", "entries": [[2, -1], [-1, 2]]}
                   | {"type": "tridiagonal", "diagonal": [...], "offdiagonal": [...]},
      "nonlinearity": {"family": "cubic" | "arctan" | "emden_fowler" | "affine" | "zero",
                       "p": 3, "slope": 1.0, "offset": 1.0},
      "parameter_box": {"lo": 0.5, "hi": 2.0},      # scalars broadcast to dimension n
      "parameter": 1.0,                             # u, scalar or list
      "lambda": 3.0 | {"factor": 1.5},              # factor times the finite interval endpoint
      "regime": "superquadratic" | "subquadratic",  # default: from the family
      "constants": {"a": 1.0, "b": null},           # override registered constants
      "growth": {"gamma": 3, "zeta": 0.1, "theta": 2} | {"mu": 1, "nu": 5, "theta1": 1},
      "solver": {"tol": 1e-10, "max_iter": 1000000, "initial": [...], "step": null,
                 "step_rule": "gradient" | "monotone", "adaptive": true, "lipschitz": null},
      "bvp": {"n": 3},
      "sequence": {"kind": "geometric", "limit": 1.0, "direction": 1.0, "count": 30, "ratio": 0.5}
                | {"kind": "points", "limit": 1.0, "points": [[1.5], [1.25]]},
      "check": {"assumptions": ["A2", {"id": "A1", "gamma": 3, "zeta": 1, "theta": 1}],
                "radius": 10.0, "samples": 100000},
      "spectrum": {"footer": true}
    }
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np

from .assumptions import admissible_lambda_interval
from .errors import ConfigError, MonosysError
from .linalg import SymmetricMatrix, build_dirichlet_matrix
from .model import (
    GrowthCertificate,
    MonotonicityConstants,
    ParameterSpace,
    ProblemInstance,
    Regime,
    make_affine_family,
    make_arctan_family,
    make_cubic_family,
    make_emden_fowler_family,
    make_zero_family,
)
from .solver import SolveConfig

FAMILIES = ("cubic", "arctan", "emden_fowler", "affine", "zero")


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    return cfg


def config_digest(cfg, seed):
    canon = json.dumps({"config": cfg, "seed": seed}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _section(cfg, key, required=False):
    sec = cfg.get(key)
    if sec is None:
        if required:
            raise ConfigError(f"config field '{key}' is required")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config field '{key}' must be an object")
    return sec


def _number(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config field '{field}' must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"config field '{field}' must be finite")
    return float(value)


def _vector(value, field):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.array([_number(value, field)])
    if not isinstance(value, list) or not value:
        raise ConfigError(f"config field '{field}' must be a number or a non-empty list")
    return np.array([_number(v, field) for v in value])


def _wrap(field, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except (MonosysError, ValueError, TypeError) as exc:
        raise ConfigError(f"config field '{field}': {exc}") from exc


def build_matrix(cfg):
    sec = _section(cfg, "matrix", required=True)
    kind = sec.get("type", "dirichlet")
    if kind == "dirichlet":
        n = sec.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError(f"config field 'matrix.n' must be a positive integer, got {n!r}")
        return build_dirichlet_matrix(n)
    if kind == "dense":
        return _wrap("matrix.entries", SymmetricMatrix.from_dense, sec.get("entries"))
    if kind == "tridiagonal":
        return _wrap("matrix.diagonal", SymmetricMatrix.tridiagonal, sec.get("diagonal"), sec.get("offdiagonal", []))
    raise ConfigError(f"config field 'matrix.type' must be dirichlet, dense or tridiagonal, got {kind!r}")


def build_space(cfg, n):
    sec = _section(cfg, "parameter_box", required=True)
    lo = sec.get("lo")
    hi = sec.get("hi")
    lo = _vector(lo, "parameter_box.lo")
    hi = _vector(hi, "parameter_box.hi")
    lo = lo if lo.size > 1 else np.full(n, lo[0])
    hi = hi if hi.size > 1 else np.full(n, hi[0])
    return _wrap("parameter_box", ParameterSpace, lo, hi)


def build_family(cfg, n):
    sec = _section(cfg, "nonlinearity", required=True)
    family = sec.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"config field 'nonlinearity.family' must be one of {', '.join(FAMILIES)}, got {family!r}")
    space = build_space(cfg, n)
    field = "nonlinearity"
    if family == "cubic":
        return _wrap(field, make_cubic_family, n, space)
    if family == "arctan":
        return _wrap(field, make_arctan_family, n, space)
    if family == "emden_fowler":
        p = _number(sec.get("p", 3), "nonlinearity.p")
        offset = _number(sec.get("offset", 1.0), "nonlinearity.offset")
        return _wrap(field, make_emden_fowler_family, n, p, space, offset=offset)
    if family == "affine":
        return _wrap(field, make_affine_family, n, space, slope=_number(sec.get("slope", 1.0), "nonlinearity.slope"))
    return _wrap(field, make_zero_family, n, space)


def _constants(cfg, h):
    sec = cfg.get("constants")
    if sec is None:
        return h.constants
    if not isinstance(sec, dict):
        raise ConfigError("config field 'constants' must be an object")
    a = sec.get("a", h.constants.a)
    b = sec.get("b", h.constants.b)
    a = None if a is None else _number(a, "constants.a")
    b = None if b is None else _number(b, "constants.b")
    return _wrap("constants", MonotonicityConstants, a=a, b=b)


def growth_from_dict(sec, field="growth"):
    if "gamma" in sec:
        keys = ("gamma", "zeta", "theta")
        kind = Regime.SUPERQUADRATIC
    elif "mu" in sec:
        keys = ("mu", "nu", "theta1")
        kind = Regime.SUBQUADRATIC
    else:
        raise ConfigError(f"config field '{field}' needs gamma/zeta/theta or mu/nu/theta1")
    missing = [k for k in keys if k not in sec]
    if missing:
        raise ConfigError(f"config field '{field}.{missing[0]}' is required")
    vals = [_number(sec[k], f"{field}.{k}") for k in keys]
    return _wrap(f"{field}.{keys[1]}", GrowthCertificate, kind, *vals)


def _growth(cfg, h, regime):
    sec = cfg.get("growth")
    if sec is None:
        return h.growth if h.growth is not None and h.growth.kind is regime else None
    if not isinstance(sec, dict):
        raise ConfigError("config field 'growth' must be an object")
    return growth_from_dict(sec)


def _regime(cfg, h):
    r = cfg.get("regime")
    if r is None:
        if h.growth is not None:
            return h.growth.kind
        return Regime.SUPERQUADRATIC if h.constants.a is not None else Regime.SUBQUADRATIC
    try:
        return Regime(r)
    except ValueError:
        raise ConfigError(f"config field 'regime' must be superquadratic or subquadratic, got {r!r}") from None


def resolve_lambda(cfg, regime, A, constants):
    lam = cfg.get("lambda")
    if lam is None:
        raise ConfigError("config field 'lambda' is required")
    if isinstance(lam, dict):
        factor = _number(lam.get("factor"), "lambda.factor")
        interval = _wrap("lambda", admissible_lambda_interval, regime, A, constants)
        edge = interval.lower if regime is Regime.SUPERQUADRATIC else interval.upper
        lam = factor * edge
    lam = _number(lam, "lambda")
    if not lam > 0:
        raise ConfigError(f"config field 'lambda' must be positive, got {lam}")
    return lam


def build_problem(cfg, A=None, h=None):
    """ProblemInstance described by the config (matrix, nonlinearity, lambda)."""
    A = build_matrix(cfg) if A is None else A
    h = build_family(cfg, A.n) if h is None else h
    regime = _regime(cfg, h)
    constants = _constants(cfg, h)
    growth = _growth(cfg, h, regime)
    lam = resolve_lambda(cfg, regime, A, constants)
    return _wrap("regime", ProblemInstance, A=A, lam=lam, h=h, regime=regime, constants=constants, growth=growth)


def parameter(cfg, space, field="parameter"):
    if field not in cfg:
        raise ConfigError(f"config field '{field}' is required")
    u = _vector(cfg[field], field)
    return _wrap(field, space.point, u, name=field)


def solve_config(cfg):
    sec = _section(cfg, "solver")
    kwargs = {}
    if "tol" in sec:
        kwargs["tol"] = _number(sec["tol"], "solver.tol")
    if "max_iter" in sec:
        mi = sec["max_iter"]
        if isinstance(mi, bool) or not isinstance(mi, int):
            raise ConfigError("config field 'solver.max_iter' must be an integer")
        kwargs["max_iter"] = mi
    if sec.get("initial") is not None:
        kwargs["initial"] = _vector(sec["initial"], "solver.initial")
    if sec.get("step") is not None:
        kwargs["step"] = _number(sec["step"], "solver.step")
    if "step_rule" in sec:
        kwargs["step_rule"] = sec["step_rule"]
    if "adaptive" in sec:
        kwargs["adaptive"] = bool(sec["adaptive"])
    config = _wrap("solver", SolveConfig, **kwargs)
    lip = sec.get("lipschitz")
    return config, (None if lip is None else _number(lip, "solver.lipschitz"))
