"""Lasso / simplex-SVM equivalence: reductions, solvers, screening and kernels."""

from .problem import (
    DegenerateError,
    DimensionError,
    FeasibilityError,
    LassoInstance,
    SeparatorReport,
    SolveReport,
    SvmInstance,
    duality_gap,
    lasso_objective,
    margin,
    svm_objective,
)
from .reductions import (
    LabeledData,
    ReductionMeta,
    barycentric_contract,
    barycentric_expand,
    lasso_to_svm,
    nonneg_lasso_to_svm,
    soft_margin_dual,
    svm_to_lasso,
    trivial_separator,
)
from .solvers import SolverConfig, perceptron, project_l1, solve_gram_fw, solve_lasso_pg, solve_svm_fw

__all__ = [
    "DegenerateError", "DimensionError", "FeasibilityError", "LassoInstance", "SeparatorReport",
    "SolveReport", "SvmInstance", "duality_gap", "lasso_objective", "margin", "svm_objective",
    "LabeledData", "ReductionMeta", "barycentric_contract", "barycentric_expand", "lasso_to_svm",
    "nonneg_lasso_to_svm", "soft_margin_dual", "svm_to_lasso", "trivial_separator",
    "SolverConfig", "perceptron", "project_l1", "solve_gram_fw", "solve_lasso_pg", "solve_svm_fw",
]
