"""How many columns safe screening removes as the reference solve tightens.

    python scripts/screening_demo.py --d 30 --n 200
"""

import argparse

import numpy as np

from svmlasso.datasets import random_lasso
from svmlasso.problem import LassoInstance, lasso_subopt_bound
from svmlasso.screening import restrict_lasso, screen_lasso
from svmlasso.solvers import SolverConfig, solve_lasso_pg


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--d", type=int, default=30)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    base = random_lasso(np.random.default_rng(args.seed), args.d, args.n)
    inst = LassoInstance(base.matrix, 4.0 * base.rhs)
    full = solve_lasso_pg(inst, SolverConfig(tol=1e-12, max_iter=10**6, pg_stop="gap"))
    print(f"optimum {full.objective:.12f}, support {np.count_nonzero(full.solution)}")
    print(f"{'ref tol':>8} {'bound':>10} {'kept':>5} {'re-solve error':>15}")
    for tol in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
        x = solve_lasso_pg(inst, SolverConfig(tol=tol, pg_stop="gap")).solution
        bound = lasso_subopt_bound(inst, x)
        rep = screen_lasso(inst, x, bound)
        sub = solve_lasso_pg(restrict_lasso(inst, rep), SolverConfig(tol=1e-12, max_iter=10**6, pg_stop="gap"))
        print(f"{tol:>8.0e} {bound:>10.2e} {len(rep.kept):>5} {abs(sub.objective - full.objective):>15.2e}")


if __name__ == "__main__":
    main()
