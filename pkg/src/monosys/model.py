"""Problem data: parameter boxes, componentwise nonlinearities, certificates.

A nonlinearity is stored as a single vectorized callable ``func(idx, z, u)``
that evaluates ``h_idx(z, u)`` for arrays of 0-based component indices and
scalar arguments at one parameter vector ``u``.  Component ``i`` of
``h(x, u)`` is then ``func(i, x[i], u)``, so it cannot depend on any other
coordinate of ``x``.

Growth constants for the built-in families
------------------------------------------
cubic, ``h_i(z, u) = z + z**3 + u_i`` with ``lo <= u <= hi``::

    sum_i h_i(z_i) z_i = |z|^2 + sum z_i^4 + sum u_i z_i
                      >= |z|^2 + |z|^4 / n - hi * sqrt(n) * |z|

using ``sum z_i^4 >= |z|^4 / n`` and Cauchy-Schwarz.  With
``zeta = min(lo, 1) / (2n) <= 1/(2n)`` and ``|z| >= 1`` we have
``|z|^4/n - zeta |z|^3 >= |z|^4 / (2n)``, and ``|z|^4 / (2n) >= hi sqrt(n) |z|``
once ``|z|^3 >= 2 n^1.5 hi``.  Hence gamma = 3 and
``theta = max(1, (2 n^1.5 hi)^(1/3))``.

Emden-Fowler, ``h_i(z, u) = z + u_i |z|^(p-1) z + c``::

    sum h_i z_i >= |z|^2 + lo * n^((1-p)/2) |z|^(p+1) - |c| sqrt(n) |z|

by the power-mean inequality ``sum |z_i|^q >= n^(1 - q/2) |z|^q`` (q >= 2).
With ``k = lo * n^((1-p)/2)``, ``gamma = min(p + 1, 3)`` and ``|z| >= 1`` one
half of the power term dominates ``(k/2) |z|^gamma`` and the other half
dominates the offset term when ``|z|^p >= 2 |c| sqrt(n) / k``, giving
``zeta = k / 2`` and ``theta = max(1, (2 |c| sqrt(n) / k)^(1/p))``.

arctan, ``h_i(z, u) = arctan(z) + u_i``: ``|h_i| <= pi/2 + hi`` so
``sum h_i z_i <= (pi/2 + hi) sqrt(n) |z|`` for every z: mu = 1,
``nu = sqrt(n) (pi/2 + hi)``, theta_1 = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidConstantError,
    InvalidDimensionError,
    NotPositiveDefiniteError,
    ParameterOutOfBoxError,
)
from .linalg import SymmetricMatrix, as_vector, is_positive_definite

NONTRIVIAL_TOL = 1e-12


class Regime(str, enum.Enum):
    SUPERQUADRATIC = "superquadratic"
    SUBQUADRATIC = "subquadratic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ParameterSpace:
    """Axis-aligned box in R^m with the Euclidean metric."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo, name="lo")
        hi = as_vector(self.hi, n=lo.size, name="hi")
        if np.any(lo > hi):
            raise InvalidConstantError("parameter box needs lo <= hi coordinatewise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def box(cls, lo, hi, m=1):
        """Box from scalar or vector bounds; scalars are broadcast to length m."""
        lo_a = np.broadcast_to(np.asarray(lo, dtype=float), (m,)) if np.ndim(lo) == 0 else lo
        hi_a = np.broadcast_to(np.asarray(hi, dtype=float), (m,)) if np.ndim(hi) == 0 else hi
        return cls(np.array(lo_a, dtype=float), np.array(hi_a, dtype=float))

    @property
    def dimension(self):
        return self.lo.size

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        return u.shape == self.lo.shape and bool(np.all((u >= self.lo) & (u <= self.hi)))

    def point(self, u, name="u"):
        """Validate ``u`` as a point of the box and return it as an array."""
        u = as_vector(u, name=name)
        if u.size == 1 and self.dimension > 1:
            u = np.full(self.dimension, u[0])
        if u.size != self.dimension:
            raise DimensionMismatchError(f"{name} has dimension {u.size}, parameter box has {self.dimension}")
        if not self.contains(u):
            raise ParameterOutOfBoxError(f"{name}={u.tolist()} lies outside the parameter box [{self.lo.tolist()}, {self.hi.tolist()}]")
        return u

    def distance(self, u, v):
        return float(np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float)))

    def grid(self, count=9):
        """Deterministic points on the main diagonal of the box, corners included."""
        t = np.linspace(0.0, 1.0, count)[:, None]
        return self.lo + t * (self.hi - self.lo)

    def samples(self, count, seed, grid=9):
        """Grid points followed by `count` seeded uniform points of the box."""
        rng = np.random.default_rng(seed)
        rand = self.lo + rng.random((count, self.dimension)) * (self.hi - self.lo)
        return np.vstack([self.grid(grid), rand])


@dataclass(frozen=True)
class GrowthCertificate:
    """Claimed growth bound outside a ball.

    superquadratic: ``sum h_k(z_k) z_k >= coefficient * |z|^exponent`` for
    ``|z| >= radius`` (exponent > 2).  subquadratic: the reversed inequality
    with exponent < 2.
    """

    kind: Regime
    exponent: float
    coefficient: float
    radius: float

    def __post_init__(self):
        kind = Regime(self.kind)
        object.__setattr__(self, "kind", kind)
        for name in ("exponent", "coefficient", "radius"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConstantError(f"{name} must be finite")
        if kind is Regime.SUPERQUADRATIC and not self.exponent > 2:
            raise InvalidConstantError(f"superquadratic exponent gamma must exceed 2, got {self.exponent}")
        if kind is Regime.SUBQUADRATIC and not self.exponent < 2:
            raise InvalidConstantError(f"subquadratic exponent mu must be below 2, got {self.exponent}")
        if not self.coefficient > 0:
            raise InvalidConstantError(f"growth coefficient must be positive, got {self.coefficient}")
        if not self.radius > 0:
            raise InvalidConstantError(f"growth radius must be positive, got {self.radius}")

    @classmethod
    def superquadratic(cls, gamma, zeta, theta):
        return cls(Regime.SUPERQUADRATIC, float(gamma), float(zeta), float(theta))

    @classmethod
    def subquadratic(cls, mu, nu, theta1):
        return cls(Regime.SUBQUADRATIC, float(mu), float(nu), float(theta1))

    def as_dict(self):
        if self.kind is Regime.SUPERQUADRATIC:
            return {"kind": self.kind.value, "gamma": self.exponent, "zeta": self.coefficient, "theta": self.radius}
        return {"kind": self.kind.value, "mu": self.exponent, "nu": self.coefficient, "theta1": self.radius}


@dataclass(frozen=True)
class MonotonicityConstants:
    """Lower slope bound ``a`` and/or upper slope bound ``b`` of every h_k."""

    a: Optional[float] = None
    b: Optional[float] = None

    def __post_init__(self):
        if self.a is None and self.b is None:
            raise InvalidConstantError("at least one of the constants a, b is required")
        for name in ("a", "b"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InvalidConstantError(f"constant {name} must be positive, got {v}")


ComponentFunc = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ComponentwiseNonlinearity:
    """h(x, u) = [h_1(x_1, u), ..., h_n(x_n, u)] together with its certificates."""

    n: int
    func: ComponentFunc
    space: ParameterSpace
    derivative: Optional[ComponentFunc] = None
    constants: Optional[MonotonicityConstants] = None
    growth: Optional[GrowthCertificate] = None
    name: str = "custom"
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidDimensionError(f"nonlinearity dimension must be positive, got {self.n!r}")

    def component(self, idx, z, u):
        """Vectorized ``h_idx(z, u)`` without box validation (hot path)."""
        idx = np.asarray(idx, dtype=int)
        z = np.asarray(z, dtype=float)
        return np.asarray(self.func(idx, z, u), dtype=float) * np.ones_like(z)

    def slope(self, idx, z, u):
        if self.derivative is None:
            raise NotImplementedError("no derivative evaluator registered")
        idx = np.asarray(idx, dtype=int)
        z = np.asarray(z, dtype=float)
        return np.asarray(self.derivative(idx, z, u), dtype=float) * np.ones_like(z)

    def __call__(self, x, u):
        return evaluate_h(self, x, u)


def evaluate_h(h, x, u):
    x = as_vector(x, n=h.n)
    u = h.space.point(u)
    return h.component(np.arange(h.n), x, u)


def _positive_box(n, space, family):
    if space.dimension != n:
        raise DimensionMismatchError(f"{family} family needs a parameter box of dimension {n}, got {space.dimension}")
    if not np.all(space.lo > 0):
        raise InvalidConstantError(f"{family} family needs a strictly positive parameter box, got lo={space.lo.tolist()}")


def _space_for(n, space):
    if isinstance(space, ParameterSpace):
        return space
    lo, hi = space
    return ParameterSpace.box(lo, hi, m=n)


def make_cubic_family(n, space):
    """h_i(z, u) = z + z^3 + u_i; A2 with a = 1, A1 with gamma = 3."""
    space = _space_for(n, space)
    _positive_box(n, space, "cubic")
    u_lo = float(space.lo.min())
    u_hi = float(space.hi.max())
    zeta = min(u_lo, 1.0) / (2.0 * n)
    theta = max(1.0, (2.0 * n**1.5 * u_hi) ** (1.0 / 3.0))
    return ComponentwiseNonlinearity(
        n=n,
        func=lambda i, z, u: z + z**3 + u[i],
        derivative=lambda i, z, u: 1.0 + 3.0 * z**2,
        space=space,
        constants=MonotonicityConstants(a=1.0),
        growth=GrowthCertificate.superquadratic(3.0, zeta, theta),
        name="cubic",
    )


def make_arctan_family(n, space):
    """h_i(z, u) = arctan(z) + u_i; A4 with b = 1, A3 with mu = 1."""
    space = _space_for(n, space)
    _positive_box(n, space, "arctan")
    nu = math.sqrt(n) * (math.pi / 2 + float(space.hi.max()))
    return ComponentwiseNonlinearity(
        n=n,
        func=lambda i, z, u: np.arctan(z) + u[i],
        derivative=lambda i, z, u: 1.0 / (1.0 + z**2),
        space=space,
        constants=MonotonicityConstants(b=1.0),
        growth=GrowthCertificate.subquadratic(1.0, nu, 1.0),
        name="arctan",
    )


def make_emden_fowler_family(n, p, space, offset=1.0):
    """h_i(z, u) = z + u_i |z|^(p-1) z + offset; a = 1, gamma = min(p+1, 3)."""
    if not p > 1:
        raise InvalidConstantError(f"Emden-Fowler exponent p must exceed 1, got {p}")
    space = _space_for(n, space)
    _positive_box(n, space, "Emden-Fowler")
    p = float(p)
    k = float(space.lo.min()) * n ** ((1.0 - p) / 2.0)
    gamma = min(p + 1.0, 3.0)
    zeta = k / 2.0
    theta = 1.0
    if offset != 0:
        theta = max(1.0, (2.0 * abs(offset) * math.sqrt(n) / k) ** (1.0 / p))
    return ComponentwiseNonlinearity(
        n=n,
        func=lambda i, z, u: z + u[i] * np.abs(z) ** (p - 1.0) * z + offset,
        derivative=lambda i, z, u: 1.0 + p * u[i] * np.abs(z) ** (p - 1.0),
        space=space,
        constants=MonotonicityConstants(a=1.0),
        growth=GrowthCertificate.superquadratic(gamma, zeta, theta),
        name="emden_fowler",
        info={"p": p, "offset": offset},
    )


def make_affine_family(n, space, slope=1.0):
    """h_i(z, u) = slope * z + u_i.

    Registers a = slope (if positive) and b = slope (b = 1 when slope is 0,
    any positive b bounds a flat function).  No growth certificate: affine
    maps satisfy neither A1 nor a useful A3.
    """
    space = _space_for(n, space)
    if space.dimension != n:
        raise DimensionMismatchError(f"affine family needs a parameter box of dimension {n}")
    slope = float(slope)
    if slope < 0:
        raise InvalidConstantError("affine family slope must be non-negative")
    constants = MonotonicityConstants(a=slope, b=slope) if slope > 0 else MonotonicityConstants(b=1.0)
    return ComponentwiseNonlinearity(
        n=n,
        func=lambda i, z, u: slope * z + u[i],
        derivative=lambda i, z, u: np.full_like(z, slope),
        space=space,
        constants=constants,
        name="affine",
        info={"slope": slope},
    )


def make_zero_family(n, space=None):
    """h = 0.  Fails the nontriviality hypothesis by design."""
    if space is None:
        space = ParameterSpace.box(0.0, 1.0, m=n)
    space = _space_for(n, space)
    return ComponentwiseNonlinearity(
        n=n,
        func=lambda i, z, u: np.zeros_like(z),
        derivative=lambda i, z, u: np.zeros_like(z),
        space=space,
        constants=MonotonicityConstants(b=1.0),
        name="zero",
    )


@dataclass(frozen=True)
class NontrivialityResult:
    passed: bool
    counterexample: Optional[np.ndarray] = None
    value_norm: Optional[float] = None
    samples_used: int = 0

    def __bool__(self):
        return self.passed


def check_nontriviality(h, space=None, samples=1000, seed=0):
    """Search the box for a parameter with h(0, u) = 0.

    A pass only means no sampled point violated the hypothesis.
    """
    space = h.space if space is None else space
    pts = space.samples(samples, seed)
    idx = np.arange(h.n)
    zero = np.zeros(h.n)
    for count, u in enumerate(pts, start=1):
        val = float(np.linalg.norm(h.component(idx, zero, u)))
        if val <= NONTRIVIAL_TOL:
            return NontrivialityResult(False, np.array(u), val, count)
    return NontrivialityResult(True, samples_used=len(pts))


@dataclass(frozen=True)
class ProblemInstance:
    """The system A x = lam * h(x, u) together with its regime data."""

    A: SymmetricMatrix
    lam: float
    h: ComponentwiseNonlinearity
    regime: Regime
    constants: MonotonicityConstants
    growth: Optional[GrowthCertificate] = None
    space: Optional[ParameterSpace] = None

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.space is None:
            object.__setattr__(self, "space", self.h.space)
        if self.A.n != self.h.n:
            raise DimensionMismatchError(f"matrix is {self.A.n}x{self.A.n} but h has dimension {self.h.n}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InvalidConstantError(f"lambda must be positive, got {self.lam}")
        if self.regime is Regime.SUPERQUADRATIC and self.constants.a is None:
            raise InvalidConstantError("superquadratic regime requires the constant a")
        if self.regime is Regime.SUBQUADRATIC:
            if self.constants.b is None:
                raise InvalidConstantError("subquadratic regime requires the constant b")
            if not is_positive_definite(self.A):
                raise NotPositiveDefiniteError("subquadratic regime requires a positive definite matrix")
        if self.growth is not None and self.growth.kind is not self.regime:
            raise InvalidConstantError(f"growth certificate is {self.growth.kind.value} but regime is {self.regime.value}")

    @property
    def n(self):
        return self.A.n

    @classmethod
    def from_family(cls, A, lam, h, regime=None):
        """Use the constants and certificate registered on `h`."""
        if regime is None:
            if h.growth is not None:
                regime = h.growth.kind
            elif h.constants.a is not None:
                regime = Regime.SUPERQUADRATIC
            else:
                regime = Regime.SUBQUADRATIC
        regime = Regime(regime)
        growth = h.growth if h.growth is not None and h.growth.kind is regime else None
        return cls(A=A, lam=float(lam), h=h, regime=regime, constants=h.constants, growth=growth)
