"""Kernels and the kernelized Lasso.

The Lasso over lifted columns, ``min_{||x||_1 <= 1} ||sum_i Psi(A_i) x_i - Psi(b)||^2``,
is the SVM over the ``2n`` points ``+-Psi(A_i) - Psi(b)``.  Their Gram matrix
only needs kernel values among ``A_1..A_n`` and ``b``::

    K[u, v] = s_u s_v k(A_u, A_v) - s_u k(A_u, b) - s_v k(A_v, b) + k(b, b)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import DimensionError, SolveReport
from .solvers import SolverConfig, solve_gram_fw

KINDS = ("linear", "polynomial", "rbf", "precomputed")
PSD_TOL = -1e-8
SYM_TOL = 1e-10


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "linear"
    degree: int = 2
    coef0: float = 0.0
    gamma: float = 1.0
    # precomputed: (n+1) x (n+1) kernel values over A_1..A_n, b (b last)
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KernelError(f"unknown kernel {self.kind!r}")
        if self.kind == "polynomial" and self.degree < 1:
            raise KernelError("polynomial degree must be >= 1")
        if self.kind == "rbf" and not self.gamma > 0:
            raise KernelError("rbf gamma must be positive")
        if self.kind == "precomputed":
            if self.matrix is None:
                raise KernelError("precomputed kernel needs a matrix")
            m = np.array(self.matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise KernelError(f"precomputed kernel must be square, got {m.shape}")
            if np.max(np.abs(m - m.T), initial=0.0) > SYM_TOL:
                raise KernelError("precomputed kernel is not symmetric")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @classmethod
    def parse(cls, text: str, loader=None) -> "KernelSpec":
        """``linear``, ``poly:DEG:COEF0``, ``rbf:GAMMA`` or ``precomputed:PATH``."""
        head, _, rest = text.partition(":")
        if head == "linear":
            return cls("linear")
        if head in ("poly", "polynomial"):
            parts = rest.split(":") if rest else []
            degree = int(parts[0]) if parts else 2
            coef0 = float(parts[1]) if len(parts) > 1 else 0.0
            return cls("polynomial", degree=degree, coef0=coef0)
        if head == "rbf":
            return cls("rbf", gamma=float(rest) if rest else 1.0)
        if head == "precomputed":
            if loader is None:
                raise KernelError("precomputed kernel needs a file loader")
            return cls("precomputed", matrix=loader(rest))
        raise KernelError(f"cannot parse kernel spec {text!r}")


def kernel_eval(spec: KernelSpec, y, z) -> float:
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if y.shape != z.shape:
        raise DimensionError(f"kernel arguments have shapes {y.shape} and {z.shape}")
    return float(kernel_matrix(spec, y[:, None], z[:, None])[0, 0])


def kernel_matrix(spec: KernelSpec, p, q) -> np.ndarray:
    """Kernel values between the columns of ``p`` and the columns of ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if spec.kind == "precomputed":
        raise KernelError("a precomputed kernel cannot be evaluated on new points")
    if p.shape[0] != q.shape[0]:
        raise DimensionError("points have different dimensions")
    inner = p.T @ q
    if spec.kind == "linear":
        return inner
    if spec.kind == "polynomial":
        return (inner + spec.coef0) ** spec.degree
    sq = (p * p).sum(0)[:, None] + (q * q).sum(0)[None, :] - 2.0 * inner
    return np.exp(-spec.gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class KernelLassoGram:
    gram: np.ndarray
    signs: np.ndarray

    @property
    def n(self) -> int:
        return self.signs.shape[0] // 2


def _check_gram(k: np.ndarray) -> None:
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise KernelError(f"Gram matrix must be square, got {k.shape}")
    if np.max(np.abs(k - k.T), initial=0.0) > SYM_TOL * max(1.0, np.abs(k).max()):
        raise KernelError("Gram matrix is not symmetric")
    lo = float(np.linalg.eigvalsh(0.5 * (k + k.T)).min())
    if lo < PSD_TOL * max(1.0, np.abs(k).max()):
        raise KernelError(f"Gram matrix is not positive semidefinite (min eigenvalue {lo:.3e})")


def point_kernel(a, b, spec: KernelSpec) -> np.ndarray:
    """``(n+1) x (n+1)`` kernel values over the point list ``A_1..A_n, b``."""
    if spec.kind == "precomputed":
        return spec.matrix
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise DimensionError("rhs length does not match matrix rows")
    pts = np.column_stack([a, b])
    return kernel_matrix(spec, pts, pts)


def kernel_lasso_gram(a, b, spec: KernelSpec) -> KernelLassoGram:
    """``2n x 2n`` Gram of the mirrored, translated lifted columns.

    For a precomputed spec ``a`` and ``b`` are ignored and may be ``None``.
    """
    kp = point_kernel(a, b, spec)
    n = kp.shape[0] - 1
    if n < 1:
        raise DimensionError("need at least one column")
    kaa, kab, kbb = kp[:n, :n], kp[:n, n], kp[n, n]
    signs = np.concatenate([np.ones(n), -np.ones(n)])
    idx = np.concatenate([np.arange(n), np.arange(n)])
    k = (np.outer(signs, signs) * kaa[np.ix_(idx, idx)]
         - (signs * kab[idx])[:, None]
         - (signs * kab[idx])[None, :]
         + kbb)
    k = 0.5 * (k + k.T)
    _check_gram(k)
    k.setflags(write=False)
    signs.setflags(write=False)
    return KernelLassoGram(gram=k, signs=signs)


def kernel_svm_gram(points, labels, spec: KernelSpec, C: Optional[float] = None) -> np.ndarray:
    """Gram of the label-signed points, plus ``I/C`` for the squared-loss soft margin."""
    y = np.asarray(labels, dtype=float)
    k = kernel_matrix(spec, points, points) * np.outer(y, y)
    if C is not None:
        k = k + np.eye(k.shape[0]) / C
    return k


def solve_kernel_lasso(gram: KernelLassoGram, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Frank-Wolfe on ``min_{x in simplex} x^T K x``.

    ``extras["coefficients"]`` holds the signed Lasso coefficients
    (first block minus second block).
    """
    k = np.asarray(gram.gram, dtype=float)
    if np.max(np.abs(k - k.T), initial=0.0) > SYM_TOL * max(1.0, np.abs(k).max()):
        raise KernelError("Gram matrix is not symmetric")
    rep = solve_gram_fw(k, cfg)
    n = gram.n
    rep.extras["coefficients"] = rep.solution[:n] - rep.solution[n:]
    return rep
