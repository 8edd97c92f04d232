"""Safe sphere screening for the l1-ball Lasso and the simplex SVM.

Both objectives are squared norms of an affine image, so
``||r_ref - r*||^2 <= f(x_ref) - f*`` for the unique optimal residual ``r*``.
With ``rho = sqrt(subopt)`` every correlation at the optimum is therefore
known up to ``+- ||A_j|| rho``.

Lasso: an active column attains ``max_k |A_k^T r*|``.  Column ``j`` is safe to
drop when even its upper bound falls below the largest lower bound::

    |A_j^T r| + ||A_j|| rho  <  max_k ( |A_k^T r| - ||A_k|| rho )

SVM: an active column attains ``min_k A_k^T w*`` with ``w* = A x*``, and
shifting every column by the same vector ``c`` only adds the constant
``c^T w*``.  Column ``j`` is dropped when::

    c_j^T w - ||c_j|| rho  >  min_k ( c_k^T w + ||c_k|| rho ),   c_j = A_j + c

For a reduced Lasso instance ``c = b`` turns the SVM test into exactly the
Lasso test on both mirrored copies.

An exact reference makes optimal columns tie with the extreme correlation, and
the computed residual is only accurate to ``eps`` times the size of its
operands.  The radius is therefore ``sqrt(subopt + ROUNDING * m^2)`` with
``m = ||b|| + max_j ||A_j||`` for the Lasso (radius one) and
``m = ||c|| + max_j ||c_j||`` for the SVM; the two agree under ``c = b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import (
    DEFAULT_TOL,
    DimensionError,
    LassoInstance,
    SvmInstance,
    check_l1_ball,
    check_simplex,
    lasso_objective,
    svm_objective,
)


ROUNDING = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class ScreeningReport:
    kept: tuple
    discarded: tuple
    radius_used: float
    reference_objective: float

    @property
    def n(self) -> int:
        return len(self.kept) + len(self.discarded)


def _check_subopt(subopt: float) -> float:
    subopt = float(subopt)
    if not subopt >= 0:
        raise ValueError(f"suboptimality bound must be non-negative, got {subopt}")
    return subopt


def _radius(subopt: float, magnitude: float) -> float:
    return float(np.sqrt(subopt + ROUNDING * magnitude * magnitude))


def _report(drop: np.ndarray, rho: float, obj: float) -> ScreeningReport:
    idx = np.arange(drop.shape[0])
    return ScreeningReport(tuple(int(i) for i in idx[~drop]), tuple(int(i) for i in idx[drop]), rho, obj)


def screen_lasso(inst: LassoInstance, x_ref, subopt: float) -> ScreeningReport:
    """Columns certified to be zero in every Lasso optimum."""
    subopt = _check_subopt(subopt)
    x_ref = np.asarray(x_ref, dtype=float)
    check_l1_ball(x_ref / inst.radius, DEFAULT_TOL)
    if x_ref.shape != (inst.n,):
        raise DimensionError("x_ref length does not match the instance")
    a = inst.matrix
    r = inst.rhs - a @ x_ref
    corr = np.abs(a.T @ r)
    norms = np.linalg.norm(a, axis=0)
    rho = _radius(subopt, float(np.linalg.norm(inst.rhs)) + inst.radius * float(norms.max()))
    slack = norms * rho
    drop = corr + slack < np.max(corr - slack)
    return _report(drop, rho, lasso_objective(inst, x_ref))


def screen_svm(inst: SvmInstance, x_ref, subopt: float, center=None) -> ScreeningReport:
    """Columns certified to carry zero weight in every SVM optimum.

    ``center`` shifts all columns before the norm bounds are taken; the
    default is no shift.
    """
    subopt = _check_subopt(subopt)
    x_ref = check_simplex(np.asarray(x_ref, dtype=float), DEFAULT_TOL)
    if x_ref.shape != (inst.n,):
        raise DimensionError("x_ref length does not match the instance")
    a = inst.matrix
    shift = np.zeros(a.shape[0]) if center is None else np.asarray(center, dtype=float).reshape(-1)
    c = a + shift[:, None]
    w = a @ x_ref
    corr = c.T @ w
    norms = np.linalg.norm(c, axis=0)
    rho = _radius(subopt, float(np.linalg.norm(shift)) + float(norms.max()))
    slack = norms * rho
    drop = corr - slack > np.min(corr + slack)
    return _report(drop, rho, svm_objective(inst, x_ref))


def restrict_lasso(inst: LassoInstance, report: ScreeningReport) -> LassoInstance:
    """Copy of ``inst`` keeping only the surviving columns."""
    return LassoInstance(inst.matrix[:, list(report.kept)], inst.rhs, inst.radius)


def restrict_svm(inst: SvmInstance, report: ScreeningReport) -> SvmInstance:
    return SvmInstance(inst.matrix[:, list(report.kept)], inst.origin)


def lift(x_kept, report: ScreeningReport) -> np.ndarray:
    """Embed a solution of the restricted problem back into full length."""
    out = np.zeros(report.n)
    out[list(report.kept)] = np.asarray(x_kept, dtype=float)
    return out


def svm_screen_center(meta) -> Optional[np.ndarray]:
    """Column shift that aligns SVM screening with Lasso screening for a reduction."""
    if meta is not None and meta.kind in ("lasso-to-svm", "nonneg-to-svm"):
        return meta.rhs
    return None
