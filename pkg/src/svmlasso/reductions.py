"""Translations between the Lasso and the simplex-constrained SVM.

Lasso -> SVM mirrors every column and shifts by ``-b``:
``A~ = (A | -A) - b 1^T``; feasible points move through barycentric
coordinates of the cross-polytope.

SVM -> Lasso needs a direction ``w`` with positive margin ``sigma`` and a
strict bound ``D`` on the column norms.  Every column is shifted by
``b~ = -(w/||w||) D^2 / sigma`` and ``b~`` becomes the right-hand side.  On
that instance flipping negative entries and scaling up to unit l1 mass both
strictly improve the objective, so Lasso optima lie in the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import (
    DEFAULT_TOL,
    DegenerateError,
    DimensionError,
    FeasibilityError,
    LassoInstance,
    SeparatorReport,
    SvmInstance,
    _frozen_vector,
    check_l1_ball,
    problem_matrix,
)

KINDS = ("lasso-to-svm", "nonneg-to-svm", "svm-to-lasso")


@dataclass(frozen=True)
class ReductionMeta:
    kind: str
    source_n: int
    w: Optional[np.ndarray] = None
    sigma: Optional[float] = None
    bigD: Optional[float] = None
    btilde: Optional[np.ndarray] = None
    # right-hand side of the source Lasso (lasso-to-svm / nonneg-to-svm)
    rhs: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown reduction kind {self.kind!r}")
        if self.kind == "svm-to-lasso":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("svm-to-lasso needs a positive margin")
            if self.bigD is None or self.btilde is None or self.w is None:
                raise ValueError("svm-to-lasso needs w, bigD and btilde")


@dataclass(frozen=True)
class LabeledData:
    """Points as columns of a d x n matrix, labels in {+1, -1}, parameter C."""

    points: np.ndarray
    labels: np.ndarray
    C: float = 1.0

    def __post_init__(self):
        pts = problem_matrix(self.points)
        y = np.array(self.labels, dtype=float).reshape(-1)
        if y.shape[0] != pts.shape[1]:
            raise DimensionError(f"{y.shape[0]} labels for {pts.shape[1]} points")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")
        if not self.C > 0:
            raise ValueError("C must be positive")
        y.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", y)

    @classmethod
    def one_class(cls, points, C: float = 1.0) -> "LabeledData":
        pts = np.asarray(points, dtype=float)
        return cls(pts, np.ones(pts.shape[1]), C)

    @property
    def signed(self) -> np.ndarray:
        """Columns ``y_i X_i``."""
        return self.points * self.labels[None, :]


# non-negative Lasso and Lasso -> SVM -----------------------------------------

def nonneg_lasso_to_svm(a, b) -> tuple[SvmInstance, ReductionMeta]:
    a = problem_matrix(a)
    b = _frozen_vector(b, "rhs")
    if b.shape[0] != a.shape[0]:
        raise DimensionError("rhs length does not match matrix rows")
    inst = SvmInstance(a - b[:, None], "reduced-from-nonneg-lasso")
    return inst, ReductionMeta("nonneg-to-svm", a.shape[1], rhs=b)


def lasso_to_svm(inst: LassoInstance) -> tuple[SvmInstance, ReductionMeta]:
    if inst.radius != 1.0:
        raise ValueError("normalize the radius before reducing")
    a, b = inst.matrix, inst.rhs
    mirrored = np.hstack([a, -a]) - b[:, None]
    return SvmInstance(mirrored, "reduced-from-lasso"), ReductionMeta("lasso-to-svm", inst.n, rhs=b)


def barycentric_expand(x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Simplex point in R^{2n} whose block difference is ``x``.

    Positive parts go to the first block, negative parts to the second, and the
    unused mass ``(1 - ||x||_1) / 2`` sits on both copies of coordinate 1.
    """
    x = check_l1_ball(np.asarray(x, dtype=float).reshape(-1), tol)
    n = x.shape[0]
    out = np.concatenate([np.maximum(x, 0.0), np.maximum(-x, 0.0)])
    slack = max(1.0 - np.abs(x).sum(), 0.0) / 2.0
    out[0] += slack
    out[n] += slack
    return out


def barycentric_contract(x_simp) -> np.ndarray:
    x_simp = np.asarray(x_simp, dtype=float).reshape(-1)
    if x_simp.shape[0] % 2:
        raise DimensionError("barycentric vector must have even length")
    n = x_simp.shape[0] // 2
    return x_simp[:n] - x_simp[n:]


def support_correspondence(x_simp, tol: float = 0.0) -> tuple[int, int, bool]:
    """``(nnz of contracted vector, SVM support size, degenerate)``.

    ``degenerate`` flags an index whose positive and negative copies are both
    strictly above ``tol``; the counts need not agree then.
    """
    x_simp = np.asarray(x_simp, dtype=float)
    n = x_simp.shape[0] // 2
    pos, neg = x_simp[:n] > tol, x_simp[n:] > tol
    contracted = barycentric_contract(x_simp)
    return int(np.count_nonzero(np.abs(contracted) > tol)), int(pos.sum() + neg.sum()), bool(np.any(pos & neg))


# SVM -> Lasso ----------------------------------------------------------------

def estimate_bigD(inst: SvmInstance, eta: float = 0.01) -> float:
    if not eta > 0:
        raise ValueError("eta must be positive")
    top = float(np.sqrt(np.max(np.einsum("ij,ij->j", inst.matrix, inst.matrix))))
    if top == 0.0:
        raise DegenerateError("all columns are zero; no meaningful norm bound")
    return (1.0 + eta) * top


def svm_to_lasso(inst: SvmInstance, sep: SeparatorReport, bigD: float) -> tuple[LassoInstance, ReductionMeta]:
    """Lasso instance whose optima are exactly the SVM optima.

    ``sep`` must have positive margin and ``bigD`` must exceed every column
    norm strictly.
    """
    w = np.asarray(sep.direction, dtype=float)
    sigma = float(sep.margin)
    if not sigma > 0:
        raise ValueError(f"separator margin must be positive, got {sigma}")
    norms = np.sqrt(np.einsum("ij,ij->j", inst.matrix, inst.matrix))
    if not bigD > norms.max():
        raise ValueError(f"bigD={bigD} does not strictly exceed max column norm {norms.max()}")
    unit = w / np.linalg.norm(w)
    btilde = -unit * (bigD * bigD / sigma)
    lasso = LassoInstance(inst.matrix + btilde[:, None], btilde, 1.0)
    meta = ReductionMeta("svm-to-lasso", inst.n, w=w.copy(), sigma=sigma, bigD=float(bigD), btilde=btilde)
    return lasso, meta


def cone_cosines(inst: SvmInstance, w) -> np.ndarray:
    """Cosine of the angle between each column and ``w`` (zero columns give +inf)."""
    w = np.asarray(w, dtype=float)
    norms = np.linalg.norm(inst.matrix, axis=0)
    dots = inst.matrix.T @ w / np.linalg.norm(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(norms > 0, dots / norms, np.inf)


def check_cone_containment(inst: SvmInstance, sep: SeparatorReport, bigD: float) -> bool:
    """Every column lies strictly inside the cone around ``w`` of half-angle ``arccos(sigma/D)``."""
    return bool(np.all(cone_cosines(inst, sep.direction) > sep.margin / bigD))


def _require_constructed(meta: ReductionMeta) -> None:
    if meta is None or meta.kind != "svm-to-lasso":
        raise ValueError("only defined for Lasso instances built by svm_to_lasso")


def flip_to_nonneg(inst: LassoInstance, meta: ReductionMeta, x) -> np.ndarray:
    """Flip all negative coordinates at once: ``x + 2 delta`` with ``delta = max(-x, 0)``."""
    _require_constructed(meta)
    x = check_l1_ball(np.asarray(x, dtype=float), DEFAULT_TOL)
    delta = np.maximum(-x, 0.0)
    if not np.any(delta > 0):
        raise ValueError("x has no negative entry; flipping is a no-op")
    return x + 2.0 * delta


def scale_to_simplex(inst: LassoInstance, meta: ReductionMeta, x) -> np.ndarray:
    """Rescale a non-negative, nonzero ``x`` with ``||x||_1 <= 1`` to unit mass."""
    _require_constructed(meta)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise FeasibilityError("scaling needs a non-negative vector")
    mass = float(x.sum())
    if mass == 0.0:
        raise DegenerateError("cannot scale the zero vector onto the simplex")
    if mass > 1.0 + DEFAULT_TOL:
        raise FeasibilityError("vector lies outside the filled simplex")
    return x / mass


def check_inner_positivity(inst: LassoInstance, meta: ReductionMeta, x, delta) -> bool:
    """Evaluate ``(A~ x - b~)^T (-A~ delta) > 0`` for ``x, delta`` in the filled simplex."""
    _require_constructed(meta)
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if not np.any(delta != 0):
        raise ValueError("delta must be nonzero")
    if np.any(x < 0) or np.any(delta < 0):
        raise FeasibilityError("x and delta must be non-negative")
    a = inst.matrix
    return bool(float((a @ x - inst.rhs) @ (-(a @ delta))) > 0.0)


# soft-margin SVM -------------------------------------------------------------

def soft_margin_dual(data: LabeledData) -> SvmInstance:
    """Stack ``y_i X_i`` over ``I_n / sqrt(C)``; Gram is ``Z^T Z + I / C``."""
    n = data.points.shape[1]
    a = np.vstack([data.signed, np.eye(n) / np.sqrt(data.C)])
    return SvmInstance(a, "soft-margin-dual")


def trivial_separator(n: int, C: float, d: int) -> SeparatorReport:
    """Direction ``(0_d ; 1_n / sqrt(n))`` for a soft-margin dual instance.

    Each column ``(y_i X_i ; e_i / sqrt(C))`` has inner product ``1/sqrt(nC)``
    with it, whatever the data.
    """
    w = np.concatenate([np.zeros(d), np.full(n, 1.0 / np.sqrt(n))])
    return SeparatorReport(direction=w, margin=1.0 / np.sqrt(n * C))


def augment_offset(data: LabeledData, t: float = 1.0) -> LabeledData:
    """Append the constant feature ``t`` to every point (regularized offset)."""
    if not t > 0:
        raise ValueError("offset feature value must be positive")
    pts = np.vstack([data.points, np.full((1, data.points.shape[1]), float(t))])
    return LabeledData(pts, data.labels, data.C)


def primal_from_dual(data: LabeledData, alpha) -> dict:
    """Primal point of the squared-loss soft-margin SVM rebuilt from dual weights.

    ``w = Z alpha``, ``xi = alpha / C``, ``rho = min_i (w^T Z_i + xi_i)`` and the
    primal objective ``||w||^2/2 - rho + C/2 ||xi||^2``.  At a dual optimum the
    value equals ``-1/2`` times the dual objective.
    """
    alpha = np.asarray(alpha, dtype=float)
    z = data.signed
    w = z @ alpha
    xi = alpha / data.C
    rho = float(np.min(z.T @ w + xi))
    value = 0.5 * float(w @ w) - rho + 0.5 * data.C * float(xi @ xi)
    return {"w": w, "xi": xi, "rho": rho, "value": value}


def offset_classifier(data: LabeledData, alpha, t: float = 1.0) -> tuple[np.ndarray, float]:
    """Split ``w = Z alpha`` of offset-augmented data into (weights, offset)."""
    w = data.signed @ np.asarray(alpha, dtype=float)
    return w[:-1], float(w[-1] * t)

