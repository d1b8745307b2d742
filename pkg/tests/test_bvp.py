import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monosys.assumptions import admissible_lambda_interval
from monosys.bvp import (
    DifferenceProblem,
    GridFunction,
    difference_residual,
    discretize,
    emden_fowler_preset,
    second_difference,
    solve_bvp,
)
from monosys.errors import InvalidConstantError, InvalidDimensionError
from monosys.linalg import build_dirichlet_matrix
from monosys.model import (
    MonotonicityConstants,
    ParameterSpace,
    Regime,
    check_nontriviality,
    make_affine_family,
    make_cubic_family,
    make_zero_family,
)


def constant_f_problem(n, value, lam):
    return DifferenceProblem(
        n=n,
        f=lambda k, z, u: np.full_like(z, value),
        lam=lam,
        regime=Regime.SUBQUADRATIC,
        constants=MonotonicityConstants(b=1.0),
        space=ParameterSpace.box(0.0, 1.0, m=n),
    )


def test_discretize_constant_forcing():
    prob = discretize(constant_f_problem(3, -1.0, 1.0))
    np.testing.assert_array_equal(prob.A.to_dense(), build_dirichlet_matrix(3).to_dense())
    np.testing.assert_array_equal(prob.h(np.array([0.3, -2.0, 7.0]), np.zeros(3)), [1.0, 1.0, 1.0])


def test_discretize_cubic_sign_flip():
    space = ParameterSpace.box(0.5, 2.0, m=3)
    p = DifferenceProblem(
        n=3,
        f=lambda k, z, u: -(z + z**3 + u[k - 1]),
        lam=5.0,
        regime=Regime.SUPERQUADRATIC,
        constants=MonotonicityConstants(a=1.0),
        space=space,
    )
    cubic = make_cubic_family(3, space)
    x = np.array([-1.5, 0.2, 3.0])
    u = np.array([0.5, 1.0, 2.0])
    np.testing.assert_array_equal(discretize(p).h(x, u), cubic(x, u))


def test_discretize_rejects_empty_grid():
    with pytest.raises(InvalidDimensionError):
        constant_f_problem(0, -1.0, 1.0)


def test_single_node_linear_bvp():
    h = make_affine_family(1, (-5.0, 5.0))
    p = DifferenceProblem.from_induced(h, 3.0, regime=Regime.SUPERQUADRATIC)
    res = solve_bvp(p, [1.0])
    np.testing.assert_allclose(res.grid.values, [0.0, -3.0, 0.0], atol=1e-9)


def test_three_node_linear_bvp():
    # (B - 4I) x = -4 * ones has the solution (2, 0, 2)
    h = make_affine_family(3, (-2.0, 2.0))
    p = DifferenceProblem.from_induced(h, 4.0, regime=Regime.SUPERQUADRATIC)
    res = solve_bvp(p, [-1.0])
    np.testing.assert_allclose(res.grid.values, [0, 2, 0, 2, 0], atol=1e-9)
    assert res.difference_residual <= 1e-9


def test_zero_forcing_gives_zero_grid():
    h = make_zero_family(4)
    p = DifferenceProblem.from_induced(h, 0.1)
    res = solve_bvp(p, np.full(4, 0.5))
    np.testing.assert_array_equal(res.grid.values, np.zeros(6))
    assert not check_nontriviality(discretize(p).h)


def test_emden_fowler_preset():
    space = ParameterSpace.box(0.5, 2.0, m=3)
    p = emden_fowler_preset(3, 3, space, lam=5.0)
    cubic = make_cubic_family(3, space)
    h = discretize(p).h
    x = np.array([-2.0, 0.1, 1.7])
    np.testing.assert_allclose(h(x, 1.0), cubic(x, 1.0), rtol=1e-15)
    interval = admissible_lambda_interval(p.regime, build_dirichlet_matrix(3), p.constants)
    assert interval.lower == pytest.approx(2 + math.sqrt(2), rel=1e-12)
    assert math.isinf(interval.upper)
    assert check_nontriviality(h)
    with pytest.raises(InvalidConstantError):
        emden_fowler_preset(3, 1.0, space, lam=5.0)


@pytest.mark.parametrize("n", [1, 5, 20])
def test_bvp_residual_recomputed_from_grid(n):
    space = ParameterSpace.box(0.5, 2.0, m=n)
    lam = 1.5 * 4.0
    p = emden_fowler_preset(n, 3, space, lam)
    u = np.linspace(0.5, 2.0, n)
    res = solve_bvp(p, u)
    x = res.grid.interior
    k = np.arange(1, n + 1)
    direct = np.max(np.abs(second_difference(res.grid) - lam * p.f(k, x, u)))
    assert res.difference_residual == direct
    assert direct <= 1e-10 * (1 + np.linalg.norm(x))


def test_grid_function_endpoints():
    with pytest.raises(ValueError):
        GridFunction([1.0, 2.0, 0.0])
    g = GridFunction.from_interior([0.5])
    assert g.n == 1
    assert g.to_csv() == "k,x\n0,0\n1,0.5\n2,0\n"


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([1, 2, 3, 10, 50]), st.integers(min_value=0, max_value=2**31))
def test_second_difference_round_trip(n, seed):
    interior = np.random.default_rng(seed).normal(scale=10.0, size=n)
    grid = GridFunction.from_interior(interior)
    B = build_dirichlet_matrix(n)
    np.testing.assert_allclose(second_difference(grid), -B.matvec(interior), rtol=0, atol=1e-14 * max(1.0, np.abs(interior).max()))


def test_difference_residual_uses_original_f():
    p = constant_f_problem(2, -1.0, 1.0)
    # Delta^2 of (0, 1, 1, 0) is (-1, -1); f = -1 with lam = 1 gives zero residual
    assert difference_residual(p, GridFunction.from_interior([1.0, 1.0]), np.zeros(2)) == 0.0
