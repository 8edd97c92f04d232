"""Reference solvers.

* ``solve_svm_fw`` - Frank-Wolfe with away steps over the simplex, stopping on
  the margin-based duality gap.
* ``solve_gram_fw`` - the same method driven only by a Gram matrix.
* ``solve_lasso_pg`` - projected gradient over the l1 ball; used as the
  independent oracle for every equivalence check.
* ``perceptron`` - averaged perceptron producing a weakly separating direction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .problem import (
    DegenerateError,
    LassoInstance,
    SeparatorReport,
    SolveReport,
    SvmInstance,
    _gap_from_direction,
)

log = logging.getLogger(__name__)

STEP_RULES = ("exact-line-search", "2/(k+2)")
CHECK_EVERY = 10


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 100_000
    seed: int = 0
    step_rule: str = "exact-line-search"
    # Frank-Wolfe only: allow away steps (linear convergence on the simplex)
    away_steps: bool = True
    # projected gradient only: Nesterov momentum with adaptive restarts
    accelerated: bool = True
    # projected gradient only: "stationarity" (gradient mapping) or "gap"
    # (Wolfe gap over the l1 ball, a bound on suboptimality)
    pg_stop: str = "stationarity"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.pg_stop not in ("stationarity", "gap"):
            raise ValueError(f"unknown stopping rule {self.pg_stop!r}")


# Frank-Wolfe -----------------------------------------------------------------

def _fw_start(col_sq_norms: np.ndarray) -> int:
    return int(np.argmin(col_sq_norms))


def solve_svm_fw(inst: SvmInstance, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Minimize ``||Ax||^2`` over the simplex.

    Stops when ``||Ax|| - max(0, min_i A_i^T Ax / ||Ax||) <= cfg.tol``.  The
    linear oracle breaks ties by the lowest column index.  With the exact line
    search the objective never increases.
    """
    a = inst.matrix
    n = inst.n
    x = np.zeros(n)
    s0 = _fw_start(np.einsum("ij,ij->j", a, a))
    x[s0] = 1.0
    w = a[:, s0].copy()
    exact = cfg.step_rule == "exact-line-search"
    gap = np.inf
    it = 0
    for it in range(cfg.max_iter):
        if it and it % 200 == 0:
            w = a @ x
        g = a.T @ w
        gap = _gap_from_direction(a, w)
        if gap <= cfg.tol:
            break
        s = int(np.argmin(g))
        xg = float(g @ x)
        away = False
        if cfg.away_steps and exact:
            active = np.flatnonzero(x > 0)
            v = int(active[np.argmax(g[active])])
            away = (g[v] - xg) > (xg - g[s]) and x[v] < 1.0
        if away:
            dw = w - a[:, v]
            gmax = x[v] / (1.0 - x[v])
        else:
            dw = a[:, s] - w
            gmax = 1.0
        if exact:
            den = float(dw @ dw)
            if den == 0.0:
                break
            gamma = min(max(-float(w @ dw) / den, 0.0), gmax)
        else:
            gamma = 2.0 / (it + 2.0)
        if gamma == 0.0:
            # no descent possible along the chosen direction: numerical floor
            break
        if away:
            x *= 1.0 + gamma
            x[v] = 0.0 if gamma == gmax else x[v] - gamma
        else:
            x *= 1.0 - gamma
            x[s] += gamma
        w = w + gamma * dw
    else:
        it = cfg.max_iter
    w = a @ x
    gap = _gap_from_direction(a, w)
    converged = gap <= cfg.tol
    if not converged:
        log.info("frank-wolfe stopped after %d iterations with gap %.3e", it, gap)
    return SolveReport(
        solution=x,
        objective=float(w @ w),
        gap=gap,
        iterations=it,
        seed=cfg.seed,
        domain="simplex",
        converged=converged,
    )


def gram_gap(gram: np.ndarray, x: np.ndarray) -> float:
    q = float(x @ gram @ x)
    if q <= 0.0:
        return 0.0
    norm = np.sqrt(q)
    sigma = float(np.min(gram @ x)) / norm
    return max(norm - max(sigma, 0.0), 0.0)


def solve_gram_fw(gram, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Minimize ``x^T K x`` over the simplex using only the Gram matrix ``K``.

    Same stopping rule as :func:`solve_svm_fw` with ``||Ax||`` replaced by
    ``sqrt(x^T K x)``.  Each iteration costs O(n) after the column lookup.
    """
    k = np.asarray(gram, dtype=float)
    n = k.shape[0]
    diag = np.diag(k).copy()
    x = np.zeros(n)
    s0 = _fw_start(diag)
    x[s0] = 1.0
    g = k[:, s0].copy()
    q = float(diag[s0])
    exact = cfg.step_rule == "exact-line-search"
    gap = np.inf
    it = 0
    for it in range(cfg.max_iter):
        if it and it % 200 == 0:
            g = k @ x
            q = float(x @ g)
        if q <= 0.0:
            gap = 0.0
            break
        norm = np.sqrt(q)
        gap = max(norm - max(float(g.min()) / norm, 0.0), 0.0)
        if gap <= cfg.tol:
            break
        s = int(np.argmin(g))
        away = False
        if cfg.away_steps and exact:
            active = np.flatnonzero(x > 0)
            v = int(active[np.argmax(g[active])])
            away = (g[v] - q) > (q - g[s]) and x[v] < 1.0
        if away:
            # direction x - e_v
            slope = q - g[v]
            curv = q - 2.0 * g[v] + diag[v]
            gmax = x[v] / (1.0 - x[v])
        else:
            slope = g[s] - q
            curv = diag[s] - 2.0 * g[s] + q
            gmax = 1.0
        if exact:
            if curv <= 0.0:
                break
            gamma = min(max(-slope / curv, 0.0), gmax)
        else:
            gamma = 2.0 / (it + 2.0)
        if gamma == 0.0:
            break
        q = q + 2.0 * gamma * slope + gamma * gamma * curv
        if away:
            g = (1.0 + gamma) * g - gamma * k[:, v]
            x *= 1.0 + gamma
            x[v] = 0.0 if gamma == gmax else x[v] - gamma
        else:
            g = (1.0 - gamma) * g + gamma * k[:, s]
            x *= 1.0 - gamma
            x[s] += gamma
    else:
        it = cfg.max_iter
    gap = gram_gap(k, x)
    return SolveReport(
        solution=x,
        objective=float(x @ k @ x),
        gap=gap,
        iterations=it,
        seed=cfg.seed,
        domain="simplex",
        converged=gap <= cfg.tol,
    )


# l1 ball ---------------------------------------------------------------------

def project_l1(v, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto ``{x : ||x||_1 <= radius}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u) - radius
    idx = np.arange(1, u.size + 1)
    cand = np.flatnonzero(u - css / idx > 0)
    # index 0 always qualifies in exact arithmetic; rounding can hide it for huge inputs
    rho = cand[-1] if cand.size else 0
    theta = css[rho] / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def power_iteration(a: np.ndarray, iters: int = 50, seed: int = 0) -> float:
    """Estimate of the largest eigenvalue of ``A^T A``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        u = a.T @ (a @ v)
        lam = float(np.linalg.norm(u))
        if lam == 0.0:
            return 0.0
        v = u / lam
    return lam


def _pg_measures(a, x, r, lip):
    """(stationarity, Wolfe gap) at ``x`` with residual ``r = Ax - b``."""
    grad = 2.0 * (a.T @ r)
    stat = float(np.linalg.norm(project_l1(x - grad / lip) - x)) * lip
    wolfe = max(float(grad @ x) + float(np.abs(grad).max()), 0.0)
    return stat, wolfe


def solve_lasso_pg(inst: LassoInstance, cfg: SolverConfig = SolverConfig()) -> SolveReport:
    """Projected gradient for ``min ||Ax - b||^2`` over the unit l1 ball.

    Step ``1/L`` with ``L = 2 * lambda_max(A^T A)`` from 50 power iterations
    (seeded by ``cfg.seed``).  The power estimate is a lower bound, so ``L``
    doubles whenever a step fails the sufficient-decrease test.  With
    ``cfg.accelerated`` the steps are taken from a Nesterov extrapolation
    that is reset whenever the step opposes the momentum.

    With ``cfg.pg_stop == "stationarity"`` the run stops once the gradient
    mapping ``L * ||x - P(x - grad/L)||`` is at most ``cfg.tol``; with
    ``"gap"`` it stops once the Wolfe gap ``grad^T x + ||grad||_inf`` (an upper
    bound on suboptimality) is.  The measures are evaluated every
    ``CHECK_EVERY`` iterations.  The report's ``gap`` is the measure used;
    both are in ``extras``.
    """
    if inst.radius != 1.0:
        raise ValueError("normalize the radius before solving")
    a, b = inst.matrix, inst.rhs
    lip = 2.0 * power_iteration(a, 50, cfg.seed) * 1.01
    x = np.zeros(inst.n)
    if lip == 0.0:
        return SolveReport(x, float(b @ b), 0.0, 0, cfg.seed, "l1",
                           extras={"stationarity": 0.0, "wolfe_gap": 0.0, "lipschitz": 0.0})
    use_stat = cfg.pg_stop == "stationarity"
    r = -b.copy()                       # residual at x
    fx = float(r @ r)
    y, ry = x.copy(), r.copy()          # extrapolated point and its residual
    t = 1.0
    stat, wolfe = _pg_measures(a, x, r, lip)
    it = 0
    converged = (stat if use_stat else wolfe) <= cfg.tol
    while not converged and it < cfg.max_iter:
        it += 1
        fy = float(ry @ ry)
        grad = 2.0 * (a.T @ ry)
        exact = False
        while True:
            xn = project_l1(y - grad / lip)
            d = xn - y
            rn = a @ xn - b
            fn = float(rn @ rn)
            # sufficient decrease for a 1/L step; fails only if L is underestimated
            if fn <= fy + float(grad @ d) + 0.5 * lip * float(d @ d) + 1e-14 * max(1.0, fy):
                break
            if not exact:
                # the cached residual at y may have drifted; rule that out first
                exact = True
                ry = a @ y - b
                fy = float(ry @ ry)
                grad = 2.0 * (a.T @ ry)
                continue
            if not np.isfinite(lip) or float(d @ d) == 0.0:
                break
            lip *= 2.0
        if cfg.accelerated:
            # restart when the step points against the momentum; unlike a
            # function-value test this does not drown in rounding at large scale
            if float((y - xn) @ (xn - x)) > 0.0:
                t = 1.0
            tn = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            beta = (t - 1.0) / tn
            y = xn + beta * (xn - x)
            ry = rn + beta * (rn - r)
            t = tn
        else:
            y, ry = xn, rn
        x, r, fx = xn, rn, fn
        if it % CHECK_EVERY == 0 or it == cfg.max_iter:
            # refresh the residual to keep rounding from accumulating
            r = a @ x - b
            if cfg.accelerated:
                ry = a @ y - b
            fx = float(r @ r)
            stat, wolfe = _pg_measures(a, x, r, lip)
            converged = (stat if use_stat else wolfe) <= cfg.tol
    r = a @ x - b
    stat, wolfe = _pg_measures(a, x, r, lip)
    measure = stat if use_stat else wolfe
    converged = measure <= cfg.tol
    if not converged:
        log.info("projected gradient stopped after %d iterations, %s %.3e", it, cfg.pg_stop, measure)
    return SolveReport(
        solution=x,
        objective=float(r @ r),
        gap=measure,
        iterations=it,
        seed=cfg.seed,
        domain="l1",
        converged=converged,
        extras={"stationarity": stat, "wolfe_gap": wolfe, "lipschitz": lip},
    )


# perceptron ------------------------------------------------------------------

def perceptron(inst: SvmInstance, cfg: SolverConfig = SolverConfig()) -> SeparatorReport:
    """Averaged perceptron: add the minimum-margin column each round.

    The iterate stays a uniform average of the chosen columns, i.e. ``w = A x``
    with ``x`` in the simplex.  Returns the best-margin direction seen; stops
    early once ``||w|| - margin <= cfg.tol``.
    """
    a = inst.matrix
    total = 0
    s = 0
    wsum = np.zeros(inst.d)
    best = None
    for _ in range(cfg.max_iter):
        total += 1
        wsum += a[:, s]
        w = wsum / total
        norm = np.linalg.norm(w)
        g = a.T @ w
        s = int(np.argmin(g))
        if norm > 0:
            m = float(g[s]) / norm
            if best is None or m > best[1]:
                best = (w.copy(), m)
            if norm - m <= cfg.tol:
                break
    if best is None:
        raise DegenerateError("perceptron iterates never left the origin")
    return SeparatorReport(direction=best[0], margin=best[1])
