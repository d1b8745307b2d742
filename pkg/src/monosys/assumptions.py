"""Sampling falsifiers for the growth and monotonicity hypotheses.

A falsifier can only refute a claimed constant; a clean run is reported as
``not-falsified``, never as verified.  Sample order is fixed by the seed and
the first violation in that order is the one reported.

The a priori bounds come from testing the system against the solution
itself.  For A x = lam h(x, u) and |x| >= theta::

    lam * zeta * |x|^gamma <= lam (h(x,u), x) = (A x, x) <= ||A|| |x|^2

so ``|x| <= max(theta, (||A|| / (lam zeta))^(1/(gamma-2)))``.  In the
subquadratic case ``lambda_1 |x|^2 <= (A x, x) = lam (h(x,u), x) <= lam nu |x|^mu``
gives ``|x| <= max(theta_1, (lam nu / lambda_1)^(1/(2-mu)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InadmissibleLambdaError, InvalidConstantError, NotPositiveDefiniteError
from .linalg import smallest_eigenvalue, spectral_norm
from .model import GrowthCertificate, MonotonicityConstants, Regime

DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 20240601
TIE_TOL = 1e-12
PARAM_POINTS = 16

NOT_FALSIFIED = "not-falsified"
COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class FalsificationReport:
    assumption: str
    verdict: str
    samples_used: int
    seed: int
    claimed: dict
    witness: Optional[dict] = None
    _h: object = field(default=None, repr=False, compare=False)

    @property
    def falsified(self):
        return self.verdict == COUNTEREXAMPLE

    def replay(self):
        """Re-evaluate the witness; True when the violation reproduces."""
        if self.witness is None:
            return False
        w = self.witness
        v = np.asarray(w["v"])
        if self.assumption in ("A2", "A4"):
            lhs, rhs, _ = _pair_sides(self._h, np.array([w["k"]]), np.array([w["z1"]]), np.array([w["z2"]]), v, self.claimed["a" if self.assumption == "A2" else "b"])
        else:
            lhs, rhs = _growth_sides(self._h, np.array([w["z"]]), v, self.claimed["exponent"], self.claimed["coefficient"])
        viol = _violates(self.assumption, lhs, rhs, np.array([w["z1"] - w["z2"]]) if "z1" in w else None)
        return bool(viol[0]) and float(lhs[0]) == w["lhs"] and float(rhs[0]) == w["rhs"]

    def as_dict(self):
        return {
            "assumption": self.assumption,
            "verdict": self.verdict,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "claimed": self.claimed,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class LambdaInterval:
    """Open interval (lower, upper) of admissible lambda values."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidConstantError(f"empty lambda interval ({self.lower}, {self.upper})")

    def __contains__(self, lam):
        return self.lower < lam < self.upper

    def __str__(self):
        return f"({self.lower:.17g}, {self.upper:.17g})"

    def as_list(self):
        return [self.lower, self.upper if math.isfinite(self.upper) else "inf"]


def _check_positive(name, value):
    if value is None or not (math.isfinite(value) and value > 0):
        raise InvalidConstantError(f"claimed constant {name} must be positive, got {value}")


def _parameter_points(space, seed):
    return space.samples(PARAM_POINTS - 9, seed + 1, grid=9)


def _pair_sides(h, k, z1, z2, v, c):
    dz = z1 - z2
    lhs = (h.component(k, z1, v) - h.component(k, z2, v)) * dz
    rhs = c * dz**2
    return lhs, rhs, dz


def _growth_sides(h, z, v, exponent, coefficient):
    n = z.shape[1]
    idx = np.broadcast_to(np.arange(n), z.shape)
    lhs = np.sum(h.component(idx, z, v) * z, axis=1)
    rhs = coefficient * np.linalg.norm(z, axis=1) ** exponent
    return lhs, rhs


def _violates(assumption, lhs, rhs, dz=None):
    if assumption in ("A2", "A4"):
        slack = TIE_TOL * (1.0 + dz**2)
    else:
        slack = TIE_TOL * (1.0 + np.abs(lhs) + np.abs(rhs))
    if assumption in ("A1", "A2"):
        return lhs < rhs - slack
    return lhs > rhs + slack


def _first_violation(viol):
    hits = np.flatnonzero(viol)
    return int(hits[0]) if hits.size else None


def _falsify_pair(assumption, h, space, c, radius, samples, seed):
    space = h.space if space is None else space
    if not radius > 0:
        raise InvalidConstantError(f"search radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    k = rng.integers(0, h.n, size=samples)
    z1 = rng.uniform(-radius, radius, size=samples)
    z2 = rng.uniform(-radius, radius, size=samples)
    params = _parameter_points(space, seed)
    group = np.arange(samples) % len(params)
    lhs = np.empty(samples)
    rhs = np.empty(samples)
    dz = z1 - z2
    for g, v in enumerate(params):
        sel = group == g
        lhs[sel], rhs[sel], _ = _pair_sides(h, k[sel], z1[sel], z2[sel], v, c)
    viol = _violates(assumption, lhs, rhs, dz) & (dz != 0)
    key = "a" if assumption == "A2" else "b"
    first = _first_violation(viol)
    if first is None:
        return FalsificationReport(assumption, NOT_FALSIFIED, samples, seed, {key: c}, None, h)
    witness = {
        "k": int(k[first]),
        "z1": float(z1[first]),
        "z2": float(z2[first]),
        "v": params[group[first]].tolist(),
        "lhs": float(lhs[first]),
        "rhs": float(rhs[first]),
        "sample_index": first,
    }
    return FalsificationReport(assumption, COUNTEREXAMPLE, first + 1, seed, {key: c}, witness, h)


def falsify_A2(h, space=None, a=None, radius=10.0, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Look for (h_k(z1,v) - h_k(z2,v))(z1 - z2) < a |z1 - z2|^2."""
    _check_positive("a", a)
    return _falsify_pair("A2", h, space, float(a), radius, samples, seed)


def falsify_A4(h, space=None, b=None, radius=10.0, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Look for (h_k(z1,v) - h_k(z2,v))(z1 - z2) > b |z1 - z2|^2."""
    _check_positive("b", b)
    return _falsify_pair("A4", h, space, float(b), radius, samples, seed)


def _directions(n, count, rng):
    fixed = [np.eye(n), -np.eye(n), np.ones((1, n)) / math.sqrt(n), -np.ones((1, n)) / math.sqrt(n)]
    d = np.vstack(fixed)[:count]
    if d.shape[0] < count:
        g = rng.normal(size=(count - d.shape[0], n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        d = np.vstack([d, g])
    return d


def _falsify_growth(assumption, h, space, cert, radius, samples, seed):
    space = h.space if space is None else space
    if radius < cert.radius:
        raise InvalidConstantError(f"search radius {radius} is below the certificate radius {cert.radius}")
    rng = np.random.default_rng(seed)
    dirs = _directions(h.n, samples, rng)
    radii = np.linspace(cert.radius, radius, min(samples, 97))
    r = radii[np.arange(samples) % radii.size]
    z = dirs * r[:, None]
    params = _parameter_points(space, seed)
    group = np.arange(samples) % len(params)
    lhs = np.empty(samples)
    rhs = np.empty(samples)
    for g, v in enumerate(params):
        sel = group == g
        lhs[sel], rhs[sel] = _growth_sides(h, z[sel], v, cert.exponent, cert.coefficient)
    claimed = {"kind": cert.kind.value, "exponent": cert.exponent, "coefficient": cert.coefficient, "radius": cert.radius}
    first = _first_violation(_violates(assumption, lhs, rhs))
    if first is None:
        return FalsificationReport(assumption, NOT_FALSIFIED, samples, seed, claimed, None, h)
    witness = {
        "z": z[first].tolist(),
        "v": params[group[first]].tolist(),
        "lhs": float(lhs[first]),
        "rhs": float(rhs[first]),
        "sample_index": first,
    }
    return FalsificationReport(assumption, COUNTEREXAMPLE, first + 1, seed, claimed, witness, h)


def _as_certificate(cert, kind):
    if isinstance(cert, GrowthCertificate):
        if cert.kind is not kind:
            raise InvalidConstantError(f"expected a {kind.value} certificate, got {cert.kind.value}")
        return cert
    exponent, coefficient, radius = cert
    return GrowthCertificate(kind, float(exponent), float(coefficient), float(radius))


def falsify_A1(h, space=None, certificate=None, radius=None, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Look for z with theta <= |z| <= R and sum h_k(z_k,v) z_k < zeta |z|^gamma.

    `certificate` is a superquadratic GrowthCertificate or (gamma, zeta, theta).
    """
    cert = _as_certificate(certificate if certificate is not None else h.growth, Regime.SUPERQUADRATIC)
    radius = 2.0 * cert.radius if radius is None else radius
    return _falsify_growth("A1", h, space, cert, radius, samples, seed)


def falsify_A3(h, space=None, certificate=None, radius=None, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Look for z with theta_1 <= |z| <= R and sum h_k(z_k,v) z_k > nu |z|^mu."""
    cert = _as_certificate(certificate if certificate is not None else h.growth, Regime.SUBQUADRATIC)
    radius = 2.0 * cert.radius if radius is None else radius
    return _falsify_growth("A3", h, space, cert, radius, samples, seed)


def estimate_monotonicity_constants(h, space=None, radius=10.0, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """Empirical (inf, sup) of the divided differences of the components.

    ``a_est`` is an upper bound on any valid a, ``b_est`` a lower bound on any
    valid b.  Neither is a certified constant.
    """
    space = h.space if space is None else space
    if not radius > 0:
        raise InvalidConstantError(f"search radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    k = rng.integers(0, h.n, size=samples)
    z1 = rng.uniform(-radius, radius, size=samples)
    z2 = rng.uniform(-radius, radius, size=samples)
    keep = z1 != z2
    k, z1, z2 = k[keep], z1[keep], z2[keep]
    params = _parameter_points(space, seed)
    group = np.arange(k.size) % len(params)
    q = np.empty(k.size)
    for g, v in enumerate(params):
        sel = group == g
        q[sel] = (h.component(k[sel], z1[sel], v) - h.component(k[sel], z2[sel], v)) / (z1[sel] - z2[sel])
    return float(q.min()), float(q.max())


def admissible_lambda_interval(regime, A, constants):
    """(||A||/a, inf) for the superquadratic regime, (0, lambda_1/b) otherwise."""
    regime = Regime(regime)
    if not isinstance(constants, MonotonicityConstants):
        a, b = constants
        constants = MonotonicityConstants(a=a, b=b)
    if regime is Regime.SUPERQUADRATIC:
        if constants.a is None:
            raise InvalidConstantError("superquadratic regime requires the constant a")
        return LambdaInterval(spectral_norm(A) / constants.a, math.inf)
    if constants.b is None:
        raise InvalidConstantError("subquadratic regime requires the constant b")
    lam1 = smallest_eigenvalue(A)
    if not lam1 > 1e-12:
        raise NotPositiveDefiniteError(f"subquadratic regime needs a positive definite matrix (lambda_1 = {lam1:.3g})")
    return LambdaInterval(0.0, lam1 / constants.b)


def apriori_solution_bound(regime, A, lam, growth, constants=None):
    """Radius of a ball that must contain every solution of A x = lam h(x, u)."""
    regime = Regime(regime)
    if growth.kind is not regime:
        raise InvalidConstantError(f"growth certificate is {growth.kind.value} but regime is {regime.value}")
    if constants is not None:
        interval = admissible_lambda_interval(regime, A, constants)
        if lam not in interval:
            raise InadmissibleLambdaError(lam, interval)
    elif not lam > 0:
        raise InadmissibleLambdaError(lam, LambdaInterval(0.0, math.inf))
    if regime is Regime.SUPERQUADRATIC:
        core = (spectral_norm(A) / (lam * growth.coefficient)) ** (1.0 / (growth.exponent - 2.0))
    else:
        lam1 = smallest_eigenvalue(A)
        if not lam1 > 0:
            raise NotPositiveDefiniteError("subquadratic bound needs a positive definite matrix")
        core = (lam * growth.coefficient / lam1) ** (1.0 / (2.0 - growth.exponent))
    return max(growth.radius, core)
