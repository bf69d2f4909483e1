"""Numerical mean-value points for two-dimensional mean value theorems.

Parse a bivariate function, build the residual field of a rectangle theorem
(rectangular Rolle / mean value / Cauchy, two-dimensional Pompeiu and Boggio,
plus their one-dimensional ancestors), and locate a point of the open
rectangle where the identity holds.
"""

from .expr import (
    BinOp,
    Call,
    Const,
    EvaluationError,
    Expression,
    Neg,
    ParseError,
    Var,
    const,
    evaluate,
    parse,
    pretty_print,
    substitute,
    variables,
)
from .harness import (
    CaseResult,
    FunctionFamily,
    GenerationError,
    SweepSummary,
    derive_seed,
    family_from_name,
    generate_function,
    generate_rectangle,
    proof_path_check,
    run_sweep,
)
from .hyperdual import (
    Dual,
    HyperDual,
    eval_dual,
    eval_hyperdual,
    finite_difference_oracle,
    lift,
    seed_x,
    seed_y,
)
from .locator import (
    LocateConfig,
    LocateDiagnostics,
    LocateReport,
    MeanValuePoint,
    bisect_on_segment,
    locate,
    locate_line,
    verify_at,
)
from .theorems import (
    ALL_TAGS,
    DegenerateError,
    DomainError,
    HypothesisError,
    LineResidualField,
    ONE_DIM_TAGS,
    REQUIRES_G,
    Rectangle,
    ResidualField,
    TheoremCase,
    ZERO_FREE_TAGS,
    boggio1d_residual,
    boggio2d_residual,
    build_cauchy_auxiliary,
    build_reciprocal_transform,
    corner_difference,
    fts_expansion_check,
    pompeiu1d_residual,
    pompeiu2d_residual,
    pompeiu_operator,
    pompeiu_rhs,
    reciprocal_rectangle,
    rect_cauchy_residual,
    rect_mvt_residual,
    rect_rolle_residual,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_TAGS",
    "BinOp",
    "Call",
    "CaseResult",
    "Const",
    "DegenerateError",
    "DomainError",
    "Dual",
    "EvaluationError",
    "Expression",
    "FunctionFamily",
    "GenerationError",
    "HyperDual",
    "HypothesisError",
    "LineResidualField",
    "LocateConfig",
    "LocateDiagnostics",
    "LocateReport",
    "MeanValuePoint",
    "Neg",
    "ONE_DIM_TAGS",
    "ParseError",
    "REQUIRES_G",
    "Rectangle",
    "ResidualField",
    "SweepSummary",
    "TheoremCase",
    "Var",
    "ZERO_FREE_TAGS",
    "bisect_on_segment",
    "boggio1d_residual",
    "boggio2d_residual",
    "build_cauchy_auxiliary",
    "build_reciprocal_transform",
    "const",
    "corner_difference",
    "derive_seed",
    "eval_dual",
    "eval_hyperdual",
    "evaluate",
    "family_from_name",
    "finite_difference_oracle",
    "fts_expansion_check",
    "generate_function",
    "generate_rectangle",
    "lift",
    "locate",
    "locate_line",
    "parse",
    "pompeiu1d_residual",
    "pompeiu2d_residual",
    "pompeiu_operator",
    "pompeiu_rhs",
    "pretty_print",
    "proof_path_check",
    "reciprocal_rectangle",
    "rect_cauchy_residual",
    "rect_mvt_residual",
    "rect_rolle_residual",
    "run_sweep",
    "seed_x",
    "seed_y",
    "substitute",
    "variables",
    "verify_at",
]
