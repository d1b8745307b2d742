"""Constructive solution of the strongly monotone operator equation K(x) = 0.

Both regimes lead to an operator of the form ``s * (lam * h(x, u) - A x)``
with ``s = +1`` (superquadratic, monotone with constant ``lam a - ||A||``) or
``s = -1`` (subquadratic, constant ``lambda_1 - lam b``).  The solver runs
the relaxed fixed-point iteration ``x <- x - tau K(x)``.

Step-wise certificate
---------------------
Because h is componentwise, the change of K over one step is exact::

    K(x') - K(x) = s * (lam * D - A) (x' - x),
    D = diag((h_i(x'_i) - h_i(x_i)) / (x'_i - x_i))

so ``K(x') = (I - tau J) K(x)`` with the symmetric secant matrix
``J = s (lam D - A)``.  Strong monotonicity keeps the spectrum of J above
``m`` and the observed divided differences bound it above by
``L_seg = lam * max|D| + ||A||``.  A step is accepted when the working
Lipschitz bound ``L`` covers ``L_seg``; its residual is then reduced by at
least ``(L - m)/(L + m)`` for ``tau = 2/(m + L)`` or ``sqrt(1 - m^2/L^2)``
for the conservative ``tau = m/L^2``.  When the step overshoots ``L`` the
bound is enlarged and the step recomputed.

Stopping rule
-------------
Iteration stops once ``|K(x)| <= tol (1 + |x|) min(1, m)``.  This implies the
residual test ``|K(x)| <= tol (1 + |x|)`` and, since ``|x - x*| <= |K(x)|/m``,
also bounds the error by ``tol (1 + |x|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .assumptions import admissible_lambda_interval, apriori_solution_bound
from .errors import DivergenceError, InvalidConstantError, MaxIterationsExceeded, NotStronglyMonotoneError
from .linalg import as_vector, smallest_eigenvalue, spectral_norm
from .model import Regime

LIPSCHITZ_SAFETY = 1.25
DEFAULT_RADIUS = 10.0
SLOW_CONTRACTION = 0.999
MAX_REJECTIONS = 200

GRADIENT = "gradient"
MONOTONE = "monotone"


def monotonicity_constant(problem):
    """Strong monotonicity constant of the regime's operator (may be <= 0)."""
    if problem.regime is Regime.SUPERQUADRATIC:
        return problem.lam * problem.constants.a - spectral_norm(problem.A)
    return smallest_eigenvalue(problem.A) - problem.lam * problem.constants.b


@dataclass(frozen=True)
class MonotoneOperator:
    """x -> sign * (lam h(x,u) - A x), or a bare evaluator.

    ``orientation`` records which of ``evaluate`` / ``-evaluate`` is the
    strongly monotone direction; the solver always iterates on
    ``orientation * evaluate``.
    """

    m: float
    L: float
    regime: Regime
    problem: object = None
    u: Optional[np.ndarray] = None
    sign: int = 1
    orientation: int = 1
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.m > 0:
            raise InvalidConstantError(f"monotonicity constant must be positive, got {self.m}")
        if not self.L >= self.m:
            raise InvalidConstantError(f"Lipschitz bound {self.L} is below the monotonicity constant {self.m}")
        if self.problem is None and self.evaluator is None:
            raise InvalidConstantError("operator needs a problem or an evaluator")

    @property
    def structured(self):
        return self.problem is not None

    def _parts(self, x):
        p = self.problem
        hx = p.h.component(np.arange(p.n), x, self.u)
        k = self.sign * (p.lam * hx - p.A.matvec(x))
        return k, hx

    def evaluate(self, x):
        if self.evaluator is not None:
            return self.evaluator(x)
        return self._parts(x)[0]

    __call__ = evaluate

    def monotone_parts(self, x):
        """(orientation * K(x), h(x, u) or None)."""
        if self.evaluator is not None:
            return self.orientation * self.evaluator(x), None
        k, hx = self._parts(x)
        return self.orientation * k, hx

    def negated(self):
        """The same operator with the opposite sign convention."""
        if self.evaluator is not None:
            ev = self.evaluator
            return replace(self, evaluator=lambda x: -ev(x), orientation=-self.orientation)
        return replace(self, sign=-self.sign, orientation=-self.orientation)

    def spot_check(self, radius, pairs=100, seed=0):
        """Smallest (F(x)-F(y), x-y)/|x-y|^2 over seeded pairs in the cube [-radius, radius]^n."""
        n = self.problem.n if self.structured else None
        if n is None:
            raise InvalidConstantError("spot check needs a structured operator")
        rng = np.random.default_rng(seed)
        worst = math.inf
        for _ in range(pairs):
            x = rng.uniform(-radius, radius, n)
            y = rng.uniform(-radius, radius, n)
            fx, _ = self.monotone_parts(x)
            fy, _ = self.monotone_parts(y)
            d = x - y
            worst = min(worst, float(np.dot(fx - fy, d) / np.dot(d, d)))
        return worst


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iter: int = 1_000_000
    initial: Optional[np.ndarray] = None
    step: Optional[float] = None
    step_rule: str = GRADIENT
    adaptive: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidConstantError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidConstantError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.step is not None and not self.step > 0:
            raise InvalidConstantError(f"step override must be positive, got {self.step}")
        if self.step_rule not in (GRADIENT, MONOTONE):
            raise InvalidConstantError(f"unknown step rule {self.step_rule!r}")


@dataclass
class SolveReport:
    solution: np.ndarray
    residual: float
    iterations: int
    step: float
    contraction: float
    m: float
    lipschitz: float
    residual_history: list = field(default_factory=list)
    contraction_history: list = field(default_factory=list)
    rejections: int = 0
    diagnostics: list = field(default_factory=list)
    worst_contraction: float = math.nan

    def thinned_history(self, limit=200):
        hist = self.residual_history
        if len(hist) <= limit:
            return list(hist)
        idx = np.unique(np.linspace(0, len(hist) - 1, limit).astype(int))
        return [hist[i] for i in idx]

    def as_dict(self):
        return {
            "solution": [float(v) for v in self.solution],
            "residual": self.residual,
            "iterations": self.iterations,
            "step": self.step,
            "contraction": self.contraction,
            "worst_contraction": self.worst_contraction,
            "monotonicity_constant": self.m,
            "lipschitz": self.lipschitz,
            "rejections": self.rejections,
            "diagnostics": list(self.diagnostics),
            "residual_history": self.thinned_history(),
        }


def estimate_lipschitz(problem, u, radius, grid=401):
    """L = 1.25 * lam * max sampled slope of h on [-R, R] + ||A||, at least m.

    Slopes come from the registered derivative when present, otherwise
    from divided differences on the grid.
    """
    h = problem.h
    z = np.linspace(-radius, radius, grid)
    idx = np.repeat(np.arange(h.n), grid)
    zz = np.tile(z, h.n)
    if h.derivative is not None:
        slope = float(np.max(np.abs(h.slope(idx, zz, u))))
    else:
        vals = h.component(idx, zz, u).reshape(h.n, grid)
        slope = float(np.max(np.abs(np.diff(vals, axis=1) / np.diff(z))))
    L = LIPSCHITZ_SAFETY * problem.lam * slope + spectral_norm(problem.A)
    return max(L, monotonicity_constant(problem))


def assemble_operator(problem, u, lipschitz=None, radius=None):
    """Build the strongly monotone operator of the problem's regime at u."""
    u = problem.space.point(u)
    interval = admissible_lambda_interval(problem.regime, problem.A, problem.constants)
    if problem.lam not in interval:
        raise NotStronglyMonotoneError(problem.lam, interval)
    m = monotonicity_constant(problem)
    if lipschitz is None:
        if radius is None:
            radius = DEFAULT_RADIUS
            if problem.growth is not None:
                radius = 2.0 * apriori_solution_bound(problem.regime, problem.A, problem.lam, problem.growth)
        lipschitz = estimate_lipschitz(problem, u, radius)
    sign = 1 if problem.regime is Regime.SUPERQUADRATIC else -1
    return MonotoneOperator(m=m, L=max(float(lipschitz), m), regime=problem.regime, problem=problem, u=u, sign=sign)


def _contraction(rule, tau, m, L):
    if rule == GRADIENT:
        return max(abs(1.0 - tau * m), abs(1.0 - tau * L))
    return math.sqrt(max(0.0, 1.0 - 2.0 * tau * m + (tau * L) ** 2))


def _segment_lipschitz(op, x, xn, hx, hn):
    p = op.problem
    dx = xn - x
    big = np.abs(dx) > 1e-9 * (1.0 + np.abs(x))
    slopes = np.zeros(0)
    if big.any():
        slopes = np.abs((hn[big] - hx[big]) / dx[big])
    if not big.all() and p.h.derivative is not None:
        idx = np.flatnonzero(~big)
        slopes = np.concatenate([slopes, np.abs(p.h.slope(idx, x[idx], op.u))])
    lh = float(slopes.max()) if slopes.size else 0.0
    return p.lam * lh + spectral_norm(p.A)


def solve(op, config=None):
    """Iterate x <- x - tau K(x) until |K(x)| <= tol (1 + |x|)."""
    config = SolveConfig() if config is None else config
    # overflow is detected explicitly and reported as DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        return _iterate(op, config)


def _iterate(op, config):
    n = op.problem.n if op.structured else None
    x = np.zeros(n) if config.initial is None else as_vector(config.initial, n=n, name="initial point")
    if n is None and config.initial is None:
        raise InvalidConstantError("an initial point is required for an unstructured operator")
    adaptive = config.adaptive and op.structured and config.step is None
    rule = config.step_rule if op.structured else MONOTONE
    m, L = op.m, op.L

    def step_for(L):
        if config.step is not None:
            return config.step
        return 2.0 / (m + L) if rule == GRADIENT else m / L**2

    F, hx = op.monotone_parts(x)
    res = float(np.linalg.norm(F))
    residuals = [res]
    qs = []
    rejections = 0
    tau = step_for(L)
    if not math.isfinite(res):
        raise DivergenceError(0)
    it = 0
    scale = config.tol * min(1.0, m)
    while res > scale * (1.0 + float(np.linalg.norm(x))):
        if it >= config.max_iter:
            raise MaxIterationsExceeded(it, res)
        it += 1
        tries = 0
        while True:
            tau = step_for(L)
            xn = x - tau * F
            Fn, hn = op.monotone_parts(xn)
            if not (np.all(np.isfinite(xn)) and np.all(np.isfinite(Fn))):
                if adaptive and tries < MAX_REJECTIONS:
                    L *= 4.0
                    tries += 1
                    rejections += 1
                    continue
                raise DivergenceError(it)
            if not adaptive:
                break
            lseg = _segment_lipschitz(op, x, xn, hx, hn)
            if lseg <= L or tries >= MAX_REJECTIONS:
                break
            L = LIPSCHITZ_SAFETY * lseg
            tries += 1
            rejections += 1
        qs.append(_contraction(rule if config.step is None else MONOTONE, tau, m, L))
        x, F, hx = xn, Fn, hn
        res = float(np.linalg.norm(F))
        residuals.append(res)
        if adaptive:
            L = max(m, min(L, LIPSCHITZ_SAFETY * lseg))
    # factor certified at the final working bound; early steps may be slower
    q = qs[-1] if qs else _contraction(rule, tau, m, L)
    diagnostics = []
    if q > SLOW_CONTRACTION:
        diagnostics.append(f"slow contraction: certified factor {q:.6f} exceeds {SLOW_CONTRACTION}")
    if max(qs, default=q) >= 1.0:
        diagnostics.append("contraction not certified for this step size")
    return SolveReport(
        solution=x,
        residual=res,
        iterations=it,
        step=tau,
        contraction=q,
        m=m,
        lipschitz=L,
        residual_history=residuals,
        contraction_history=qs,
        rejections=rejections,
        diagnostics=diagnostics,
        worst_contraction=max(qs) if qs else q,
    )


def residual_norm(problem, u, x):
    """|A x - lam h(x, u)|."""
    x = as_vector(x, n=problem.n)
    hx = problem.h(x, u)
    return float(np.linalg.norm(problem.A.matvec(x) - problem.lam * hx))


def solve_problem(problem, u, config=None, lipschitz=None):
    """assemble_operator followed by solve."""
    return solve(assemble_operator(problem, u, lipschitz=lipschitz), config)
