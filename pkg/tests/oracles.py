"""Independent reference solutions used by the tests."""

import math


def bisect_root(f, lo, hi, tol=1e-15, max_iter=200):
    """Plain bisection for a sign change of f on [lo, hi]."""
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("no sign change on the bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def arctan_root():
    """Root of 2x = arctan(x) + 1."""
    return bisect_root(lambda x: 2 * x - math.atan(x) - 1, 0.0, 2.0)


def dirichlet_eigenvalue(n, k):
    return 4.0 * math.sin(k * math.pi / (2 * (n + 1))) ** 2
