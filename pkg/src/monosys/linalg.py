"""Real symmetric matrices and the spectral quantities the solver needs.

Two storage layouts are supported: tridiagonal (diagonal plus one
off-diagonal band) and dense lower triangle.  Eigenvalues are computed with
Sturm-sequence bisection for the former and cyclic Jacobi rotations for the
latter.  Eigenvectors are never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, InvalidDimensionError, NonFiniteError

EIG_TOL = 1e-12

TRIDIAGONAL = "tridiagonal"
DENSE = "dense"


def as_vector(x, n=None, name="x"):
    """Return `x` as a finite 1-D float64 array, optionally of length `n`."""
    v = np.atleast_1d(np.array(x, dtype=float))
    if v.ndim != 1 or v.size == 0:
        raise InvalidDimensionError(f"{name} must be a non-empty 1-D vector")
    if n is not None and v.size != n:
        raise DimensionMismatchError(f"{name} has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return v


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class SymmetricMatrix:
    """Immutable real symmetric n x n matrix.

    Construct through :meth:`tridiagonal` or :meth:`from_dense`.  Symmetry is
    a property of the storage: only one triangle (or one band) is kept.
    """

    def __init__(self, storage, diagonal=None, offdiagonal=None, lower=None):
        self.storage = storage
        if storage == TRIDIAGONAL:
            self._diag = _readonly(diagonal)
            self._off = _readonly(offdiagonal)
            self.n = self._diag.size
        elif storage == DENSE:
            self._lower = _readonly(np.tril(lower))
            self.n = self._lower.shape[0]
        else:
            raise ValueError(f"unknown storage {storage!r}")

    @classmethod
    def tridiagonal(cls, diagonal, offdiagonal):
        d = np.asarray(diagonal, dtype=float).reshape(-1)
        e = np.asarray(offdiagonal, dtype=float).reshape(-1)
        if d.size < 1:
            raise InvalidDimensionError("matrix dimension must be at least 1")
        if e.size != d.size - 1:
            raise DimensionMismatchError(f"off-diagonal has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise NonFiniteError("matrix entries must be finite")
        return cls(TRIDIAGONAL, diagonal=d, offdiagonal=e)

    @classmethod
    def from_dense(cls, entries):
        """Build from a full square array, which must be exactly symmetric."""
        a = np.atleast_2d(np.asarray(entries, dtype=float))
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteError("matrix entries must be finite")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        return cls(DENSE, lower=a)

    @property
    def shape(self):
        return (self.n, self.n)

    def to_dense(self):
        if self.storage == TRIDIAGONAL:
            a = np.diag(self._diag)
            if self.n > 1:
                a += np.diag(self._off, 1) + np.diag(self._off, -1)
            return a
        low = np.array(self._lower)
        return low + np.tril(low, -1).T

    def entry(self, i, j):
        if self.storage == TRIDIAGONAL:
            if i == j:
                return float(self._diag[i])
            if abs(i - j) == 1:
                return float(self._off[min(i, j)])
            return 0.0
        return float(self._lower[max(i, j), min(i, j)])

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatchError(f"vector has shape {x.shape}, matrix is {self.n}x{self.n}")
        if self.storage == TRIDIAGONAL:
            y = self._diag * x
            if self.n > 1:
                y[:-1] += self._off * x[1:]
                y[1:] += self._off * x[:-1]
            return y
        low = self._lower
        return low @ x + low.T @ x - np.diagonal(low) * x

    __matmul__ = matvec

    def gershgorin_interval(self):
        if self.storage == TRIDIAGONAL:
            r = np.zeros(self.n)
            if self.n > 1:
                r[:-1] += np.abs(self._off)
                r[1:] += np.abs(self._off)
            d = self._diag
        else:
            full = self.to_dense()
            d = np.diag(full)
            r = np.abs(full).sum(axis=1) - np.abs(d)
        return float(np.min(d - r)), float(np.max(d + r))

    @cached_property
    def spectrum(self):
        return compute_spectrum(self)

    @cached_property
    def extreme_eigenvalues(self):
        # reuse a spectrum that has already been computed
        if self.storage == TRIDIAGONAL and "spectrum" not in self.__dict__:
            lo, hi = bisect_eigenvalues(self._diag, self._off, [0, self.n - 1])
            return float(lo), float(hi)
        ev = self.spectrum.eigenvalues
        return float(ev[0]), float(ev[-1])

    def __repr__(self):
        return f"SymmetricMatrix(n={self.n}, storage={self.storage!r})"


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    method: str

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.size and np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted ascending")

    def __len__(self):
        return len(self.eigenvalues)


def build_dirichlet_matrix(n):
    """Tridiagonal matrix with 2 on the diagonal and -1 beside it."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return SymmetricMatrix.tridiagonal(np.full(n, 2.0), np.full(n - 1, -1.0))


def dirichlet_eigenvalue(n, k):
    """Closed form k-th eigenvalue (1-based) of ``build_dirichlet_matrix(n)``."""
    return 4.0 * math.sin(k * math.pi / (2 * (n + 1))) ** 2


def matvec(A, x):
    return A.matvec(x)


def sturm_count(diagonal, offdiagonal, shifts):
    """Number of eigenvalues strictly below each shift.

    Uses the LDL^T pivot recurrence; a zero pivot is nudged to a tiny
    negative value as in LAPACK's dstebz.
    """
    d = np.asarray(diagonal, dtype=float)
    e2 = np.asarray(offdiagonal, dtype=float) ** 2
    x = np.atleast_1d(np.asarray(shifts, dtype=float))
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max(initial=0.0)))
    q = d[0] - x
    q = np.where(q == 0.0, -pivmin, q)
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = d[i] - x - e2[i - 1] / q
        q = np.where(q == 0.0, -pivmin, q)
        count += q < 0
    return count


def bisect_eigenvalues(diagonal, offdiagonal, indices=None, tol=EIG_TOL):
    """Eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.

    `indices` are 0-based positions in the ascending spectrum; all of them
    are bisected simultaneously.  Iteration stops when every bracket is
    narrower than `tol` or cannot be split further in floating point.
    """
    d = np.asarray(diagonal, dtype=float)
    e = np.asarray(offdiagonal, dtype=float)
    n = d.size
    idx = np.arange(n) if indices is None else np.asarray(indices, dtype=int)
    r = np.zeros(n)
    if n > 1:
        r[:-1] += np.abs(e)
        r[1:] += np.abs(e)
    glo, ghi = float(np.min(d - r)), float(np.max(d + r))
    pad = 2 * np.finfo(float).eps * max(abs(glo), abs(ghi), 1.0)
    lo = np.full(idx.size, glo - pad)
    hi = np.full(idx.size, ghi + pad)
    while True:
        active = hi - lo > tol
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        c = sturm_count(d, e, mid[active])
        above = c > idx[active]
        a_lo, a_hi = lo[active], hi[active]
        m = mid[active]
        a_hi = np.where(above, m, a_hi)
        a_lo = np.where(above, a_lo, m)
        lo[active], hi[active] = a_lo, a_hi
    return 0.5 * (lo + hi)


def jacobi_eigenvalues(a, tol=EIG_TOL, max_sweeps=100):
    """Eigenvalues of a dense symmetric matrix by cyclic Jacobi sweeps.

    Converged when the off-diagonal Frobenius norm falls below
    ``tol * ||a||_F``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.sort(np.diag(a))
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


def compute_spectrum(A):
    if A.storage == TRIDIAGONAL:
        ev = bisect_eigenvalues(A._diag, A._off)
        return Spectrum(np.sort(ev), "iterative")
    return Spectrum(jacobi_eigenvalues(A.to_dense()), "iterative")


def spectral_norm(A):
    lo, hi = A.extreme_eigenvalues
    return max(abs(lo), abs(hi))


def smallest_eigenvalue(A):
    return A.extreme_eigenvalues[0]


def is_positive_definite(A):
    return smallest_eigenvalue(A) > EIG_TOL
