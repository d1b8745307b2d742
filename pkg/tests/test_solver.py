import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monosys.assumptions import apriori_solution_bound
from monosys.errors import (
    DivergenceError,
    InadmissibleLambdaError,
    InvalidConstantError,
    MaxIterationsExceeded,
    NotStronglyMonotoneError,
)
from monosys.linalg import SymmetricMatrix, build_dirichlet_matrix, smallest_eigenvalue, spectral_norm
from monosys.model import (
    ParameterSpace,
    ProblemInstance,
    Regime,
    make_affine_family,
    make_arctan_family,
    make_cubic_family,
    make_zero_family,
)
from monosys.solver import (
    MonotoneOperator,
    SolveConfig,
    assemble_operator,
    estimate_lipschitz,
    residual_norm,
    solve,
    solve_problem,
)

from oracles import arctan_root

A2 = SymmetricMatrix.from_dense([[2.0]])


def linear_problem(lam=3.0):
    return ProblemInstance.from_family(A2, lam, make_affine_family(1, (-5.0, 5.0)), regime=Regime.SUPERQUADRATIC)


def arctan_problem(lam=1.0):
    return ProblemInstance.from_family(A2, lam, make_arctan_family(1, (0.5, 2.0)))


def cubic_problem(n, factor=1.5):
    h = make_cubic_family(n, (0.5, 2.0))
    B = build_dirichlet_matrix(n)
    return ProblemInstance.from_family(B, factor * spectral_norm(B), h)


def test_assemble_operator_constants():
    assert assemble_operator(linear_problem(), [1.0]).m == pytest.approx(1.0)
    assert assemble_operator(arctan_problem(), [1.0]).m == pytest.approx(1.0)


def test_assemble_operator_boundary_excluded():
    with pytest.raises(NotStronglyMonotoneError) as exc:
        assemble_operator(linear_problem(lam=2.0), [1.0])
    assert isinstance(exc.value, InadmissibleLambdaError)
    assert exc.value.interval.lower == 2.0 and math.isinf(exc.value.interval.upper)
    with pytest.raises(NotStronglyMonotoneError):
        assemble_operator(arctan_problem(lam=2.0), [1.0])


def test_operator_rejects_bad_constants():
    p = linear_problem()
    with pytest.raises(InvalidConstantError):
        MonotoneOperator(m=0.0, L=1.0, regime=Regime.SUPERQUADRATIC, problem=p, u=np.ones(1))
    with pytest.raises(InvalidConstantError):
        MonotoneOperator(m=2.0, L=1.0, regime=Regime.SUPERQUADRATIC, problem=p, u=np.ones(1))


def test_estimate_lipschitz_examples():
    assert estimate_lipschitz(linear_problem(), np.ones(1), 10.0) == pytest.approx(5.75)
    assert estimate_lipschitz(arctan_problem(), np.ones(1), 10.0) <= 3.25 + 1e-12
    flat = ProblemInstance(A=A2, lam=1.0, h=make_zero_family(1), regime=Regime.SUBQUADRATIC, constants=make_zero_family(1).constants)
    assert estimate_lipschitz(flat, np.zeros(1), 10.0) == pytest.approx(2.0)


def test_spot_check_monotonicity():
    op = assemble_operator(cubic_problem(4), np.ones(4))
    assert op.spot_check(radius=3.0, pairs=100, seed=1) >= op.m - 1e-9


@pytest.mark.parametrize("rule", ["gradient", "monotone"])
def test_linear_solution(rule):
    rep = solve_problem(linear_problem(), [1.0], SolveConfig(step_rule=rule))
    assert rep.solution[0] == pytest.approx(-3.0, abs=1e-9)
    assert rep.residual <= 1e-10 * (1 + 3)
    assert rep.contraction < 1


def test_arctan_matches_bisection():
    rep = solve_problem(arctan_problem(), [1.0])
    assert rep.solution[0] == pytest.approx(arctan_root(), abs=1e-6)


def test_solution_at_start_takes_no_iterations():
    rep = solve_problem(linear_problem(), [1.0], SolveConfig(initial=[-3.0]))
    assert rep.iterations == 0
    assert rep.solution[0] == -3.0


def test_residual_norm_examples():
    p = linear_problem()
    assert residual_norm(p, [1.0], [0.0]) == 3.0
    assert residual_norm(p, [1.0], [-3.0]) == 0.0
    rep = solve_problem(p, [1.0])
    assert residual_norm(p, [1.0], rep.solution) <= 1e-10 * (1 + np.linalg.norm(rep.solution))


def test_max_iterations_carries_residual():
    with pytest.raises(MaxIterationsExceeded) as exc:
        solve_problem(linear_problem(), [1.0], SolveConfig(max_iter=1))
    assert exc.value.iterations == 1
    assert exc.value.residual > 0


def test_divergence_names_iteration():
    op = assemble_operator(cubic_problem(2), np.ones(2))
    with pytest.raises(DivergenceError) as exc:
        solve(op, SolveConfig(step=1e200))
    assert exc.value.iteration >= 1


def test_solve_config_validation():
    with pytest.raises(InvalidConstantError):
        SolveConfig(tol=0)
    with pytest.raises(InvalidConstantError):
        SolveConfig(max_iter=0)
    with pytest.raises(InvalidConstantError):
        SolveConfig(step_rule="newton")


def test_slow_contraction_flagged():
    h = make_cubic_family(3, (0.5, 2.0))
    B = build_dirichlet_matrix(3)
    p = ProblemInstance.from_family(B, 1.0001 * spectral_norm(B), h)
    rep = solve_problem(p, np.ones(3), SolveConfig(tol=0.5))
    assert rep.contraction > 0.999
    assert any("slow contraction" in d for d in rep.diagnostics)


def test_fixed_lipschitz_mode_agrees():
    p = cubic_problem(5)
    u = np.full(5, 1.3)
    adaptive = solve_problem(p, u)
    fixed = solve_problem(p, u, SolveConfig(adaptive=False))
    np.testing.assert_allclose(adaptive.solution, fixed.solution, atol=1e-9)
    assert all(q < 1 for q in fixed.contraction_history)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["cubic", "arctan"]),
    st.integers(min_value=1, max_value=8),
    st.floats(min_value=0.5, max_value=2.0),
    st.sampled_from(["gradient", "monotone"]),
)
def test_residual_contracts_monotonically(family, n, uval, rule):
    B = build_dirichlet_matrix(n)
    if family == "cubic":
        p = ProblemInstance.from_family(B, 1.3 * spectral_norm(B), make_cubic_family(n, (0.5, 2.0)))
    else:
        p = ProblemInstance.from_family(B, 0.6 * smallest_eigenvalue(B), make_arctan_family(n, (0.5, 2.0)))
    rep = solve_problem(p, np.full(n, uval), SolveConfig(step_rule=rule))
    hist = rep.residual_history
    for k, q in enumerate(rep.contraction_history):
        assert q < 1
        assert hist[k + 1] <= hist[k] * (q + 1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_uniqueness_from_random_starts(n, seed):
    p = cubic_problem(n)
    u = np.full(n, 1.0)
    R = apriori_solution_bound(p.regime, p.A, p.lam, p.growth)
    rng = np.random.default_rng(seed)
    ref = solve_problem(p, u).solution
    for _ in range(3):
        x0 = rng.uniform(-2 * R, 2 * R, n)
        x = solve_problem(p, u, SolveConfig(initial=x0)).solution
        np.testing.assert_allclose(x, ref, atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["cubic", "arctan", "linear"]), st.integers(min_value=1, max_value=6))
def test_sign_convention_invariance(family, n):
    B = build_dirichlet_matrix(n)
    if family == "cubic":
        p = cubic_problem(n)
    elif family == "arctan":
        p = ProblemInstance.from_family(B, 0.5 * smallest_eigenvalue(B), make_arctan_family(n, (0.5, 2.0)))
    else:
        h = make_affine_family(n, (0.5, 2.0))
        p = ProblemInstance.from_family(B, 2 * spectral_norm(B), h, regime=Regime.SUPERQUADRATIC)
    op = assemble_operator(p, np.ones(n))
    x1 = solve(op).solution
    x2 = solve(op.negated()).solution
    np.testing.assert_allclose(x1, x2, atol=1e-10)
    np.testing.assert_array_equal(op.negated()(x1), -op(x1))


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(["cubic", "arctan"]),
    st.integers(min_value=1, max_value=10),
    st.floats(min_value=0.05, max_value=0.95),
    st.floats(min_value=0.5, max_value=2.0),
)
def test_apriori_bound_and_nontriviality(family, n, frac, uval):
    B = build_dirichlet_matrix(n)
    if family == "cubic":
        p = ProblemInstance.from_family(B, spectral_norm(B) * (1 + 4 * frac), make_cubic_family(n, (0.5, 2.0)))
    else:
        p = ProblemInstance.from_family(B, frac * smallest_eigenvalue(B), make_arctan_family(n, (0.5, 2.0)))
    x = solve_problem(p, np.full(n, uval)).solution
    bound = apriori_solution_bound(p.regime, p.A, p.lam, p.growth)
    assert np.linalg.norm(x) <= bound + 1e-9
    assert np.linalg.norm(x) > 0


def test_report_serialization():
    rep = solve_problem(linear_problem(), [1.0], SolveConfig(step_rule="monotone"))
    d = rep.as_dict()
    assert d["iterations"] == rep.iterations
    assert len(d["residual_history"]) <= 200
    assert d["residual_history"][0] == rep.residual_history[0]
    assert d["residual_history"][-1] == rep.residual_history[-1]
