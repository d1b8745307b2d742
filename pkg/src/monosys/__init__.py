"""Parametrized nonlinear systems A x = lam h(x, u) with monotone h."""

from .assumptions import (
    FalsificationReport,
    LambdaInterval,
    admissible_lambda_interval,
    apriori_solution_bound,
    estimate_monotonicity_constants,
    falsify_A1,
    falsify_A2,
    falsify_A3,
    falsify_A4,
)
from .bvp import DifferenceProblem, GridFunction, discretize, emden_fowler_preset, second_difference, solve_bvp
from .dependence import (
    DependenceReport,
    ParameterSequence,
    boundedness_check,
    geometric_sequence,
    run_dependence_study,
    stability_bound,
)
from .linalg import (
    Spectrum,
    SymmetricMatrix,
    build_dirichlet_matrix,
    is_positive_definite,
    matvec,
    smallest_eigenvalue,
    spectral_norm,
)
from .model import (
    ComponentwiseNonlinearity,
    GrowthCertificate,
    MonotonicityConstants,
    ParameterSpace,
    ProblemInstance,
    Regime,
    check_nontriviality,
    evaluate_h,
    make_affine_family,
    make_arctan_family,
    make_cubic_family,
    make_emden_fowler_family,
    make_zero_family,
)
from .solver import (
    MonotoneOperator,
    SolveConfig,
    SolveReport,
    assemble_operator,
    estimate_lipschitz,
    residual_norm,
    solve,
    solve_problem,
)

__version__ = "0.1.0"
