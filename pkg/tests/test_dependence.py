import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monosys.dependence import (
    MemberSolveError,
    ParameterSequence,
    boundedness_check,
    geometric_sequence,
    run_dependence_study,
    stability_bound,
)
from monosys.errors import InvalidConstantError, ParameterOutOfBoxError
from monosys.linalg import SymmetricMatrix, build_dirichlet_matrix, smallest_eigenvalue, spectral_norm
from monosys.model import ProblemInstance, Regime, make_affine_family, make_arctan_family, make_cubic_family
from monosys.solver import SolveConfig

A2 = SymmetricMatrix.from_dense([[2.0]])


def linear_problem():
    return ProblemInstance.from_family(A2, 3.0, make_affine_family(1, (-5.0, 5.0)), regime=Regime.SUPERQUADRATIC)


def cubic_problem(n, factor=1.5):
    B = build_dirichlet_matrix(n)
    return ProblemInstance.from_family(B, factor * spectral_norm(B), make_cubic_family(n, (0.5, 2.0)))


def test_constant_sequence_has_zero_distances():
    p = cubic_problem(4)
    seq = ParameterSequence(np.ones((5, 4)), np.ones(4))
    rep = run_dependence_study(p, seq)
    assert all(r.solution_dist <= 1e-9 for r in rep.records)
    assert all(r.stability_bound == 0.0 for r in rep.records)
    assert rep.verdict


def test_linear_distances_are_exact():
    rep = run_dependence_study(linear_problem(), geometric_sequence(1.0, 1.0, 30))
    for r in rep.records:
        assert r.solution_dist == pytest.approx(3 * 2.0**-r.k, abs=1e-9)
        assert abs(r.stability_bound - r.solution_dist) <= 1e-9
    assert rep.limit_solution[0] == pytest.approx(-3.0, abs=1e-9)


def test_arctan_distances_vanish():
    n = 3
    B = build_dirichlet_matrix(n)
    p = ProblemInstance.from_family(B, 0.5 * smallest_eigenvalue(B), make_arctan_family(n, (0.5, 2.0)))
    rep = run_dependence_study(p, geometric_sequence(np.ones(n), np.full(n, 0.5), 30))
    assert all(r.solution_dist < 1e-6 for r in rep.records if r.k >= 25)
    assert rep.within_bounds and rep.limit_consistent


def test_stability_bound_examples():
    p = linear_problem()
    assert stability_bound(p, np.array([-3.0]), [1.5], [1.0]) == pytest.approx(1.5)
    assert stability_bound(p, np.array([-3.0]), [1.0], [1.0]) == 0.0
    arctan = ProblemInstance.from_family(A2, 1.0, make_arctan_family(1, (0.5, 2.0)))
    assert stability_bound(arctan, np.array([0.85]), [1.1], [1.0]) == pytest.approx(0.1, rel=1e-12)


def test_stability_bound_needs_positive_constant():
    on_edge = ProblemInstance.from_family(A2, 2.0, make_affine_family(1, (-5.0, 5.0)), regime=Regime.SUPERQUADRATIC)
    with pytest.raises(InvalidConstantError):
        stability_bound(on_edge, np.zeros(1), [1.0], [1.0])


def test_boundedness_examples():
    p = cubic_problem(5)
    rep = run_dependence_study(p, geometric_sequence(np.ones(5), np.ones(5), 10))
    assert boundedness_check(rep, p)
    empty = run_dependence_study(p, ParameterSequence(np.zeros((0, 5)), np.ones(5)))
    assert len(empty.records) == 0 and boundedness_check(empty, p)
    res = boundedness_check(rep, p, extra_solutions=[(99, np.full(5, 1e6))])
    assert not res and res.index == 99 and res.norm > res.bound


def test_member_failure_reports_index():
    seq = ParameterSequence([[1.5]], [1.0])
    with pytest.raises(MemberSolveError) as exc:
        run_dependence_study(linear_problem(), seq, SolveConfig(max_iter=1, initial=[-3.0]))
    assert exc.value.index == 1
    with pytest.raises(MemberSolveError) as exc:
        run_dependence_study(linear_problem(), seq, SolveConfig(max_iter=1))
    assert exc.value.index == 0


def test_sequence_outside_box_rejected():
    with pytest.raises(ParameterOutOfBoxError):
        run_dependence_study(linear_problem(), ParameterSequence([[6.0]], [1.0]))


def test_nontriviality_flagged_per_index():
    rep = run_dependence_study(linear_problem(), ParameterSequence([[0.5], [0.0]], [1.0]))
    assert [r.nontrivial for r in rep.records] == [True, False]
    assert rep.summary()["nontriviality_flags"] == [2]


def test_csv_layout():
    rep = run_dependence_study(linear_problem(), geometric_sequence(1.0, 1.0, 2))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "k,param_dist,solution_dist,stability_bound"
    assert lines[1].startswith("1,0.5,")
    assert len(lines) == 3


def test_geometric_sequence_ratio_validation():
    with pytest.raises(InvalidConstantError):
        geometric_sequence(1.0, 1.0, 5, ratio=1.0)


@settings(max_examples=15, deadline=None)
@given(
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=0, max_value=2**31),
    st.floats(min_value=1.05, max_value=3.0),
)
def test_distances_within_stability_bound(n, seed, factor):
    p = cubic_problem(n, factor)
    rng = np.random.default_rng(seed)
    limit = rng.uniform(0.8, 1.7, n)
    direction = rng.uniform(-0.3, 0.3, n)
    rep = run_dependence_study(p, geometric_sequence(limit, direction, 25))
    for r in rep.records:
        assert r.solution_dist <= r.stability_bound + 1e-8
    assert rep.limit_consistent
    assert max(r.solution_dist for r in rep.records if r.k >= 20) < 1e-5
