"""Continuous dependence of solutions on the parameter.

Stability bound
---------------
Let ``K_u`` be the regime's operator at parameter u, strongly monotone with
constant m, and let ``K_u(x_u) = 0`` and ``K_ubar(xbar) = 0``.  Then::

    m |x_u - xbar|^2 <= (K_u(x_u) - K_u(xbar), x_u - xbar)
                     = -(K_u(xbar) - K_ubar(xbar), x_u - xbar)
                     <= lam |h(xbar, u) - h(xbar, ubar)| |x_u - xbar|

since ``K_u(xbar) - K_ubar(xbar) = +-lam (h(xbar, u) - h(xbar, ubar))``.
Dividing, ``|x_u - xbar| <= lam |h(xbar, u) - h(xbar, ubar)| / m``.  For the
exactly solvable system ``2x = 3(x + u)`` the bound is attained.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assumptions import apriori_solution_bound
from .errors import InvalidConstantError, MonosysError
from .model import NONTRIVIAL_TOL
from .solver import SolveConfig, assemble_operator, monotonicity_constant, residual_norm, solve

BOUND_SLACK = 1e-8
APRIORI_SLACK = 1e-9


class MemberSolveError(MonosysError):
    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"solve failed for sequence index {index}: {cause}")


@dataclass(frozen=True)
class ParameterSequence:
    points: np.ndarray
    limit: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float)) if len(self.points) else np.zeros((0, np.size(self.limit)))
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "limit", np.atleast_1d(np.asarray(self.limit, dtype=float)))

    def __len__(self):
        return self.points.shape[0]

    @property
    def distances(self):
        return np.linalg.norm(self.points - self.limit, axis=1)

    def validate(self, space):
        space.point(self.limit, name="sequence limit")
        for k, u in enumerate(self.points, start=1):
            space.point(u, name=f"sequence point {k}")


def geometric_sequence(limit, direction, count, ratio=0.5):
    """u_k = limit + ratio**k * direction for k = 1..count."""
    limit = np.atleast_1d(np.asarray(limit, dtype=float))
    direction = np.broadcast_to(np.asarray(direction, dtype=float), limit.shape)
    if not 0 < ratio < 1:
        raise InvalidConstantError(f"geometric ratio must lie in (0, 1), got {ratio}")
    k = np.arange(1, count + 1)[:, None]
    return ParameterSequence(limit + ratio**k * direction, limit)


@dataclass
class DependenceRecord:
    k: int
    param_dist: float
    solution: np.ndarray
    solution_dist: float
    stability_bound: float
    nontrivial: bool = True


@dataclass
class DependenceReport:
    records: list
    limit_solution: np.ndarray
    limit_residual: float
    limit_tolerance: float
    diagnostics: list = field(default_factory=list)

    @property
    def within_bounds(self):
        return all(r.solution_dist <= r.stability_bound + BOUND_SLACK for r in self.records)

    @property
    def limit_consistent(self):
        return self.limit_residual <= self.limit_tolerance

    @property
    def verdict(self):
        return self.within_bounds and self.limit_consistent

    def to_csv(self):
        buf = io.StringIO()
        buf.write("k,param_dist,solution_dist,stability_bound\n")
        for r in self.records:
            buf.write(f"{r.k},{r.param_dist:.17g},{r.solution_dist:.17g},{r.stability_bound:.17g}\n")
        return buf.getvalue()

    def summary(self):
        return {
            "limit_solution": [float(v) for v in self.limit_solution],
            "limit_residual": self.limit_residual,
            "limit_consistent": self.limit_consistent,
            "within_stability_bounds": self.within_bounds,
            "verdict": "pass" if self.verdict else "fail",
            "count": len(self.records),
            "nontriviality_flags": [r.k for r in self.records if not r.nontrivial],
            "diagnostics": list(self.diagnostics),
        }


def stability_bound(problem, xbar, u, ubar):
    """lam |h(xbar, u) - h(xbar, ubar)| / m."""
    m = monotonicity_constant(problem)
    if not m > 0:
        raise InvalidConstantError(f"monotonicity constant must be positive, got {m:.3g}")
    dh = problem.h(xbar, u) - problem.h(xbar, ubar)
    return problem.lam * float(np.linalg.norm(dh)) / m


def run_dependence_study(problem, seq, config=None, lipschitz=None):
    """Solve at the limit and at every sequence point, recording distances."""
    config = SolveConfig() if config is None else config
    seq.validate(problem.space)
    try:
        op = assemble_operator(problem, seq.limit, lipschitz=lipschitz)
        limit_report = solve(op, config)
    except MonosysError as exc:
        raise MemberSolveError(0, exc) from exc
    xbar = limit_report.solution
    records = []
    diagnostics = []
    for k, u in enumerate(seq.points, start=1):
        try:
            rep = solve(assemble_operator(problem, u, lipschitz=lipschitz), config)
        except MonosysError as exc:
            raise MemberSolveError(k, exc) from exc
        x = rep.solution
        h0 = problem.h.component(np.arange(problem.n), np.zeros(problem.n), u)
        nontrivial = float(np.linalg.norm(h0)) > NONTRIVIAL_TOL
        if not nontrivial:
            diagnostics.append(f"index {k}: h(0, u_k) = 0, nontriviality hypothesis fails")
        records.append(
            DependenceRecord(
                k=k,
                param_dist=problem.space.distance(u, seq.limit),
                solution=x,
                solution_dist=float(np.linalg.norm(x - xbar)),
                stability_bound=stability_bound(problem, xbar, u, seq.limit),
                nontrivial=nontrivial,
            )
        )
    return DependenceReport(
        records=records,
        limit_solution=xbar,
        limit_residual=residual_norm(problem, seq.limit, xbar),
        limit_tolerance=config.tol * (1.0 + float(np.linalg.norm(xbar))),
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class BoundednessResult:
    passed: bool
    index: Optional[int] = None
    norm: Optional[float] = None
    bound: Optional[float] = None

    def __bool__(self):
        return self.passed


def boundedness_check(report, problem, extra_solutions=None):
    """Every |x_k| must lie within the a priori radius (+1e-9)."""
    if problem.growth is None:
        raise InvalidConstantError("boundedness check needs a registered growth certificate")
    bound = apriori_solution_bound(problem.regime, problem.A, problem.lam, problem.growth)
    sols = [(r.k, r.solution) for r in report.records]
    if extra_solutions is not None:
        sols += list(extra_solutions)
    for k, x in sols:
        nrm = float(np.linalg.norm(x))
        if not nrm <= bound + APRIORI_SLACK or math.isnan(nrm):
            return BoundednessResult(False, k, nrm, bound)
    return BoundednessResult(True, bound=bound)
