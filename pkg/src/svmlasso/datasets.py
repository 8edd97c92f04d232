"""Random instance generators used by tests, the CLI harness and scripts."""

from __future__ import annotations

import numpy as np

from .problem import LassoInstance, SvmInstance
from .reductions import LabeledData


def random_lasso(rng: np.random.Generator, d: int, n: int, radius: float = 1.0) -> LassoInstance:
    """Matrix and rhs with i.i.d. entries uniform in [-1, 1]."""
    return LassoInstance(rng.uniform(-1, 1, (d, n)), rng.uniform(-1, 1, d), radius)


def random_svm(rng: np.random.Generator, d: int, n: int, shift: float = 0.0) -> SvmInstance:
    """Uniform [-1, 1] columns, optionally pushed along ``e_1`` by ``shift``."""
    a = rng.uniform(-1, 1, (d, n))
    a[0] += shift
    return SvmInstance(a)


def random_labeled(rng: np.random.Generator, d: int, n: int, C: float = 1.0,
                   separation: float = 0.5) -> LabeledData:
    """Two overlapping clouds whose means differ by ``2 * separation`` along a random unit vector.

    Both classes are guaranteed to be present when ``n >= 2``.
    """
    labels = rng.choice([-1.0, 1.0], size=n)
    if n >= 2:
        labels[0], labels[1] = 1.0, -1.0
    u = rng.standard_normal(d)
    u /= np.linalg.norm(u)
    pts = rng.uniform(-1, 1, (d, n)) + separation * np.outer(u, labels)
    return LabeledData(pts, labels, C)


def unit_reduced_lasso(rng: np.random.Generator, d: int, n: int) -> LassoInstance:
    """Random Lasso scaled so every column of ``(A | -A) - b 1^T`` has norm at most 1."""
    inst = random_lasso(rng, d, n)
    a, b = inst.matrix, inst.rhs
    top = max(np.linalg.norm(a - b[:, None], axis=0).max(), np.linalg.norm(a + b[:, None], axis=0).max())
    return LassoInstance(a / top, b / top)
