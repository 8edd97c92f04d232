"""Problem forms shared by every other module.

An SVM instance is ``min_{x in simplex} ||A x||^2`` where the columns of ``A``
are label-signed datapoints.  A Lasso instance is
``min_{||x||_1 <= r} ||A x - b||^2``.  Feasible points are plain numpy vectors;
the ``is_*`` / ``check_*`` helpers validate them against the simplex, the
filled simplex and the l1 ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DEFAULT_TOL = 1e-10

ORIGINS = ("raw", "soft-margin-dual", "reduced-from-lasso", "reduced-from-nonneg-lasso")


class DimensionError(ValueError):
    pass


class FeasibilityError(ValueError):
    pass


class DegenerateError(ValueError):
    """Raised when an operation is undefined at the given point (e.g. zero vectors)."""


def problem_matrix(a) -> np.ndarray:
    """Validate and freeze a d x n matrix whose columns are datapoints."""
    a = np.array(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    d, n = a.shape
    if d < 1 or n < 1:
        raise DimensionError(f"matrix must have d >= 1 and n >= 1, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    a.setflags(write=False)
    return a


def _frozen_vector(v, name: str) -> np.ndarray:
    v = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class SvmInstance:
    matrix: np.ndarray
    origin: str = "raw"

    def __post_init__(self):
        object.__setattr__(self, "matrix", problem_matrix(self.matrix))
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown origin tag {self.origin!r}")

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class LassoInstance:
    matrix: np.ndarray
    rhs: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "matrix", problem_matrix(self.matrix))
        object.__setattr__(self, "rhs", _frozen_vector(self.rhs, "rhs"))
        if self.rhs.shape[0] != self.matrix.shape[0]:
            raise DimensionError(
                f"rhs has length {self.rhs.shape[0]} but matrix has {self.matrix.shape[0]} rows"
            )
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class SeparatorReport:
    direction: np.ndarray
    margin: float


@dataclass(frozen=True)
class SolveReport:
    """Result of a solver run.

    ``domain`` is ``"simplex"`` or ``"l1"`` and says which feasible set the
    solution vector lives in.  ``gap`` is a certificate whose meaning depends on
    the solver (see the solver docstrings); ``converged`` is False when the
    iteration budget ran out first.
    """

    solution: np.ndarray
    objective: float
    gap: float
    iterations: int
    seed: int
    domain: str
    converged: bool = True
    extras: dict = field(default_factory=dict)


# feasibility -----------------------------------------------------------------

def is_simplex(x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x.ndim == 1 and np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)


def is_filled_simplex(x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x.ndim == 1 and np.all(x >= -tol) and x.sum() <= 1.0 + tol)


def is_l1_ball(x, tol: float = DEFAULT_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(x.ndim == 1 and np.abs(x).sum() <= 1.0 + tol)


def check_simplex(x, tol: float = DEFAULT_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not is_simplex(x, tol):
        raise FeasibilityError("point is not in the unit simplex")
    return x


def check_l1_ball(x, tol: float = DEFAULT_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not is_l1_ball(x, tol):
        raise FeasibilityError(f"point has l1 norm {np.abs(x).sum()!r} > 1")
    return x


def _check_len(x: np.ndarray, n: int) -> None:
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionError(f"vector of shape {x.shape} does not match {n} columns")


# objectives ------------------------------------------------------------------

def svm_objective(inst: SvmInstance, x) -> float:
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    w = inst.matrix @ x
    return float(w @ w)


def lasso_objective(inst: LassoInstance, x) -> float:
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    r = inst.matrix @ x - inst.rhs
    return float(r @ r)


def lasso_residual(inst: LassoInstance, x) -> np.ndarray:
    """``b - A x``."""
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    return inst.rhs - inst.matrix @ x


def margin(inst: SvmInstance, w) -> SeparatorReport:
    """Normalized worst-case inner product ``min_i A_i^T w / ||w||``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (inst.d,):
        raise DimensionError(f"direction of shape {w.shape} does not match dimension {inst.d}")
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise DegenerateError("zero direction has no margin")
    return SeparatorReport(direction=w.copy(), margin=float(np.min(inst.matrix.T @ w) / norm))


def duality_gap(inst: SvmInstance, x) -> float:
    """Certificate ``||Ax|| - max(0, margin(Ax))`` for the non-squared problem.

    Clipping the margin at zero keeps the certificate valid (the zero direction
    is always dual feasible) and lets it vanish when the optimum is ``Ax = 0``.
    """
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    w = inst.matrix @ x
    return _gap_from_direction(inst.matrix, w)


def _gap_from_direction(a: np.ndarray, w: np.ndarray) -> float:
    norm = np.linalg.norm(w)
    if norm == 0.0:
        return 0.0
    sigma = np.min(a.T @ w) / norm
    return float(max(norm - max(sigma, 0.0), 0.0))


def svm_subopt_bound(inst: SvmInstance, x) -> float:
    """Upper bound on ``svm_objective(x) - optimum`` for a simplex point ``x``.

    Takes the smaller of the Frank-Wolfe (Wolfe) gap and the bound implied by
    the margin certificate, ``||Ax||^2 - max(0, margin)^2``.
    """
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    w = inst.matrix @ x
    f = float(w @ w)
    g = inst.matrix.T @ w
    wolfe = 2.0 * (float(g @ x) - float(g.min()))
    norm = np.sqrt(f)
    sigma = max(float(g.min()) / norm, 0.0) if norm > 0 else 0.0
    return max(min(wolfe, f - sigma * sigma), 0.0)


def lasso_subopt_bound(inst: LassoInstance, x) -> float:
    """Wolfe gap ``g^T x + r ||g||_inf`` over the l1 ball of radius ``r``, ``g`` the gradient."""
    x = np.asarray(x, dtype=float)
    _check_len(x, inst.n)
    g = 2.0 * (inst.matrix.T @ (inst.matrix @ x - inst.rhs))
    return max(float(g @ x + inst.radius * np.abs(g).max()), 0.0)


def normalize_radius(inst: LassoInstance) -> LassoInstance:
    """Rewrite ``||x||_1 <= r`` as ``||u||_1 <= 1`` via ``x = r u``.

    The matrix is scaled by ``r`` so the objective at ``u`` equals the original
    objective at ``r u``; map solutions back with ``x = r * u``.
    """
    if inst.radius == 1.0:
        return inst
    return LassoInstance(inst.radius * inst.matrix, inst.rhs, 1.0)


def support(x, tol: float = 0.0) -> np.ndarray:
    return np.flatnonzero(np.abs(np.asarray(x)) > tol)
