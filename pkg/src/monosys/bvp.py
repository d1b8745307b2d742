"""Discrete Dirichlet problems  x(k+1) - 2x(k) + x(k-1) = lam f(k, x(k), u),
x(0) = x(n+1) = 0,  k = 1..n.

On interior nodes the second difference equals ``-B x`` with B the
Dirichlet matrix, so the problem is the system ``B x = lam * h(x, u)`` for
the induced nonlinearity ``h_k(z, u) = -f(k, z, u)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidDimensionError
from .linalg import build_dirichlet_matrix
from .model import (
    ComponentwiseNonlinearity,
    GrowthCertificate,
    MonotonicityConstants,
    ParameterSpace,
    ProblemInstance,
    Regime,
    make_emden_fowler_family,
)
from .solver import SolveConfig, solve_problem


@dataclass(frozen=True)
class DifferenceProblem:
    """``f(k, z, u)`` is vectorized over 1-based node indices k and values z."""

    n: int
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    lam: float
    regime: Regime
    constants: MonotonicityConstants
    space: ParameterSpace
    growth: Optional[GrowthCertificate] = None
    f_derivative: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidDimensionError(f"interior node count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "regime", Regime(self.regime))

    @classmethod
    def from_induced(cls, h, lam, regime=None):
        """Difference problem whose induced nonlinearity is the family `h`."""
        func = h.func
        deriv = h.derivative
        if regime is None:
            regime = h.growth.kind if h.growth is not None else (Regime.SUPERQUADRATIC if h.constants.a is not None else Regime.SUBQUADRATIC)
        regime = Regime(regime)
        return cls(
            n=h.n,
            f=lambda k, z, u: -func(np.asarray(k) - 1, z, u),
            f_derivative=None if deriv is None else (lambda k, z, u: -deriv(np.asarray(k) - 1, z, u)),
            lam=float(lam),
            regime=regime,
            constants=h.constants,
            space=h.space,
            growth=h.growth if h.growth is not None and h.growth.kind is regime else None,
            name=h.name,
        )


@dataclass(frozen=True)
class GridFunction:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size < 3 or v[0] != 0.0 or v[-1] != 0.0:
            raise ValueError("grid function needs pinned zero values at both ends")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_interior(cls, interior):
        return cls(np.concatenate([[0.0], np.asarray(interior, dtype=float), [0.0]]))

    @property
    def n(self):
        return self.values.size - 2

    @property
    def interior(self):
        return self.values[1:-1]

    def to_csv(self):
        buf = io.StringIO()
        buf.write("k,x\n")
        for k, v in enumerate(self.values):
            buf.write(f"{k},{v:.17g}\n")
        return buf.getvalue()


def second_difference(grid):
    """Delta^2 x(k-1) = x(k+1) - 2 x(k) + x(k-1) at interior nodes k = 1..n."""
    v = grid.values if isinstance(grid, GridFunction) else np.asarray(grid, dtype=float)
    return v[2:] - 2.0 * v[1:-1] + v[:-2]


def discretize(p):
    """The system B x = lam * h(x, u) equivalent to the difference problem."""
    f = p.f
    fd = p.f_derivative
    h = ComponentwiseNonlinearity(
        n=p.n,
        func=lambda i, z, u: -f(np.asarray(i) + 1, z, u),
        derivative=None if fd is None else (lambda i, z, u: -fd(np.asarray(i) + 1, z, u)),
        space=p.space,
        constants=p.constants,
        growth=p.growth,
        name=p.name,
    )
    return ProblemInstance(
        A=build_dirichlet_matrix(p.n),
        lam=p.lam,
        h=h,
        regime=p.regime,
        constants=p.constants,
        growth=p.growth,
        space=p.space,
    )


def difference_residual(p, grid, u):
    """max_k |Delta^2 x(k-1) - lam f(k, x(k), u)| recomputed on the grid."""
    x = grid.interior
    k = np.arange(1, p.n + 1)
    return float(np.max(np.abs(second_difference(grid) - p.lam * p.f(k, x, u))))


@dataclass
class BVPResult:
    grid: GridFunction
    report: object
    difference_residual: float
    problem: ProblemInstance


def solve_bvp(p, u, config=None):
    config = SolveConfig() if config is None else config
    problem = discretize(p)
    u = problem.space.point(u)
    report = solve_problem(problem, u, config)
    grid = GridFunction.from_interior(report.solution)
    return BVPResult(grid=grid, report=report, difference_residual=difference_residual(p, grid, u), problem=problem)


def emden_fowler_preset(n, p, space, lam, offset=1.0):
    """f(k, z, u) = -(z + u_k |z|^(p-1) z + offset)."""
    h = make_emden_fowler_family(n, p, space, offset=offset)
    return DifferenceProblem.from_induced(h, lam)
