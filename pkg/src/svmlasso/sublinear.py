"""Entry-oracle access to a reduced Lasso and a sampled primal-dual SVM solver.

The solver is a sampled primal-dual perceptron: multiplicative weights over
the columns (the min player), driven by unbiased
single-coordinate estimates of every ``A_i^T x`` obtained by sampling one
coordinate ``j`` with probability ``x_j^2 / ||x||^2``, against lazy online
gradient ascent for the direction ``x`` (the max player), which adds one
sampled column per round.  Each round therefore reads one column (``d``
entries) and one row (``n_eff`` entries) of the implicit matrix.

Iteration count is ``ceil(c * ln(n_eff) / eps^2)`` with ``c =
iteration_constant`` (default 1); the analysis constants of the original
algorithm are not reproduced.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .problem import LassoInstance, problem_matrix
from .solvers import SolverConfig


class EntryOracle:
    """Read-only access to a ``d x n_eff`` matrix, one counted entry at a time.

    Indices are 0-based.  ``column``/``row`` are vectorized conveniences that
    count every entry they return.  Pass ``count=False`` for bookkeeping reads
    (final verification) that must stay out of the sampled-loop tally.
    """

    def __init__(self, d: int, n_eff: int, column_fn: Callable[[int], np.ndarray],
                 row_fn: Callable[[int], np.ndarray], entry_fn: Callable[[int, int], float]):
        self.dims = (d, n_eff)
        self._column = column_fn
        self._row = row_fn
        self._entry = entry_fn
        self._lock = threading.Lock()
        self._count = 0
        self._uncounted = 0

    @property
    def d(self) -> int:
        return self.dims[0]

    @property
    def n_eff(self) -> int:
        return self.dims[1]

    @property
    def counter(self) -> int:
        return self._count

    @property
    def uncounted(self) -> int:
        return self._uncounted

    def _tally(self, k: int, count: bool) -> None:
        with self._lock:
            if count:
                self._count += k
            else:
                self._uncounted += k

    def _check(self, i: Optional[int], j: Optional[int]) -> None:
        if i is not None and not 0 <= i < self.d:
            raise IndexError(f"row index {i} out of range [0, {self.d})")
        if j is not None and not 0 <= j < self.n_eff:
            raise IndexError(f"column index {j} out of range [0, {self.n_eff})")

    def entry(self, i: int, j: int, count: bool = True) -> float:
        self._check(i, j)
        self._tally(1, count)
        return float(self._entry(i, j))

    def column(self, j: int, count: bool = True) -> np.ndarray:
        self._check(None, j)
        self._tally(self.d, count)
        return self._column(j)

    def row(self, i: int, count: bool = True) -> np.ndarray:
        self._check(i, None)
        self._tally(self.n_eff, count)
        return self._row(i)

    def materialize(self, count: bool = True) -> np.ndarray:
        return np.column_stack([self.column(j, count) for j in range(self.n_eff)])


def make_entry_oracle(inst: LassoInstance) -> EntryOracle:
    """Oracle for ``(A | -A) - b 1^T`` that never builds the ``d x 2n`` matrix."""
    if inst.radius != 1.0:
        raise ValueError("normalize the radius before building the oracle")
    a, b = inst.matrix, inst.rhs
    n = inst.n

    def entry(i, j):
        return a[i, j] - b[i] if j < n else -a[i, j - n] - b[i]

    def column(j):
        return a[:, j] - b if j < n else -a[:, j - n] - b

    def row(i):
        return np.concatenate([a[i], -a[i]]) - b[i]

    return EntryOracle(inst.d, 2 * n, column, row, entry)


def matrix_oracle(a) -> EntryOracle:
    """Oracle over an explicit SVM matrix (no reduction)."""
    a = problem_matrix(a)
    return EntryOracle(a.shape[0], a.shape[1], lambda j: a[:, j].copy(), lambda i: a[i].copy(),
                       lambda i, j: a[i, j])


@dataclass(frozen=True)
class SublinearReport:
    direction: np.ndarray
    margin_estimate: float
    entries_queried: int
    epsilon: float
    seed: int
    repetitions: int
    iterations: int
    verification_entries: int
    rep_margins: tuple


def _iterations(n_eff: int, epsilon: float, constant: float) -> int:
    return max(1, math.ceil(constant * max(math.log(n_eff), 1.0) / epsilon ** 2))


def _one_run(oracle: EntryOracle, epsilon: float, rng: np.random.Generator,
             norm_bound: float, constant: float) -> np.ndarray:
    d, n = oracle.dims
    T = _iterations(n, epsilon, constant)
    eta = math.sqrt(max(math.log(n), 1.0) / T)
    step = 1.0 / math.sqrt(2.0 * T)
    y = np.zeros(d)
    logw = np.zeros(n)
    xsum = np.zeros(d)
    for _ in range(T):
        p = np.exp(logw - logw.max())
        p /= p.sum()
        ny = math.sqrt(float(y @ y))
        x = y / max(1.0, ny)
        xsum += x
        i = int(rng.choice(n, p=p))
        y += step * (oracle.column(i) / norm_bound)
        nx2 = float(x @ x)
        if nx2 > 0.0:
            j = int(rng.choice(d, p=x * x / nx2))
            v = oracle.row(j) / norm_bound * (nx2 / x[j])
            np.clip(v, -1.0 / eta, 1.0 / eta, out=v)
            logw += np.log1p(eta * v * (eta * v - 1.0))
    return xsum / T


def _verified_margin(oracle: EntryOracle, w: np.ndarray) -> float:
    norm = np.linalg.norm(w)
    if norm == 0.0:
        return -math.inf
    dots = np.array([oracle.column(j, count=False) @ w for j in range(oracle.n_eff)])
    return float(dots.min() / norm)


def solve_sublinear(oracle: EntryOracle, epsilon: float = 0.1, cfg: SolverConfig = SolverConfig(),
                    repetitions: int = 5, norm_bound: float = 1.0,
                    iteration_constant: float = 1.0) -> SublinearReport:
    """Sampled solver for ``max_{||w|| <= 1} min_j A_j^T w``.

    ``norm_bound`` must bound every column norm; ``epsilon`` is an additive
    accuracy in the same units.  Runs ``repetitions`` independent passes, each
    with its own stream derived from ``(cfg.seed, repetition)``, and keeps the
    direction with the best margin.  Margins are checked with one full pass per
    repetition that is reported separately from ``entries_queried``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    eps_unit = epsilon / norm_bound
    start = oracle.counter
    best_w, best_m = None, -math.inf
    margins = []
    seq = np.random.SeedSequence(cfg.seed)
    for rep, child in enumerate(seq.spawn(repetitions)):
        rng = np.random.default_rng(child)
        w = _one_run(oracle, eps_unit, rng, norm_bound, iteration_constant)
        m = _verified_margin(oracle, w)
        margins.append(m)
        if best_w is None or m > best_m:
            best_w, best_m = w, m
    return SublinearReport(
        direction=best_w,
        margin_estimate=best_m,
        entries_queried=oracle.counter - start,
        epsilon=epsilon,
        seed=cfg.seed,
        repetitions=repetitions,
        iterations=_iterations(oracle.n_eff, eps_unit, iteration_constant),
        verification_entries=repetitions * oracle.d * oracle.n_eff,
        rep_margins=tuple(margins),
    )


def column_norm_bound(a, b=None) -> float:
    """Largest column norm of ``a`` or, given ``b``, of ``(a | -a) - b 1^T``.

    Computed from the explicit data, outside any oracle tally.
    """
    a = np.asarray(a, dtype=float)
    if b is None:
        return float(np.sqrt(np.max(np.einsum("ij,ij->j", a, a))))
    b = np.asarray(b, dtype=float).reshape(-1, 1)
    plus = np.einsum("ij,ij->j", a - b, a - b)
    minus = np.einsum("ij,ij->j", a + b, a + b)
    return float(np.sqrt(max(plus.max(), minus.max())))
