"""mvtkit: witness-point solvers and sufficient-condition checks for
Flett-type mean value theorems.

The package turns the defining equations of Flett's theorem and its
higher-order and two-function generalizations into executable numerics:
parse a function, locate the guaranteed interior point, replay the nested
constructive argument stage by stage, or evaluate the Trahan-type products
that certify existence without the equal-derivative hypothesis.
"""

from .jets import DomainError, Jet
from . import jets
from .exprs import (
    Binary,
    Constant,
    Expr,
    ParseError,
    Unary,
    Variable,
    eval_jet,
    eval_value,
    parse,
    poly_coeffs,
    to_source,
)
from .derivs import DerivEvaluator, sample_scale
from .theorems import (
    BoundaryReport,
    ConditionReport,
    MvtProblem,
    ResidualEvaluator,
    StageAux,
    Theorem,
    ZeroDenominatorError,
    check_boundary,
    divided_diff_eval,
    k_ratio,
    phi_deriv,
    phi_eval,
    problem_scale,
    psi_deriv,
    psi_eval,
    residual,
    taylor_poly_eval,
    trahan_check,
    trahan_check_general,
    two_function_aux,
    two_function_sign_value,
)
from .solver import (
    BoundaryConditionError,
    CascadeStageError,
    CascadeWitness,
    NonFiniteEvaluation,
    RootScan,
    SolveStatus,
    SolverConfig,
    Witness,
    cascade_solve,
    find_roots,
    solve,
)
from .harness import (
    CaseResult,
    DrawnPoly,
    GeneratorSpec,
    VerificationReport,
    draw_constrained_poly,
    gen_constrained_poly,
    poly_source,
    verify_batch,
)

__version__ = "0.1.0"

__all__ = [
    "Binary",
    "BoundaryConditionError",
    "BoundaryReport",
    "CascadeStageError",
    "CascadeWitness",
    "CaseResult",
    "ConditionReport",
    "Constant",
    "DerivEvaluator",
    "DomainError",
    "DrawnPoly",
    "Expr",
    "GeneratorSpec",
    "Jet",
    "MvtProblem",
    "NonFiniteEvaluation",
    "ParseError",
    "ResidualEvaluator",
    "RootScan",
    "SolveStatus",
    "SolverConfig",
    "StageAux",
    "Theorem",
    "Unary",
    "VerificationReport",
    "Variable",
    "Witness",
    "ZeroDenominatorError",
    "cascade_solve",
    "check_boundary",
    "divided_diff_eval",
    "draw_constrained_poly",
    "eval_jet",
    "eval_value",
    "find_roots",
    "gen_constrained_poly",
    "jets",
    "k_ratio",
    "parse",
    "phi_deriv",
    "phi_eval",
    "poly_coeffs",
    "poly_source",
    "problem_scale",
    "psi_deriv",
    "psi_eval",
    "residual",
    "sample_scale",
    "solve",
    "taylor_poly_eval",
    "to_source",
    "trahan_check",
    "trahan_check_general",
    "two_function_aux",
    "two_function_sign_value",
    "verify_batch",
]
