"""Entries queried by the sampled solver versus full matrix size.

    python scripts/sublinear_scaling.py --sizes 25,50,100,200 --seeds 10
"""

import argparse

import numpy as np

from svmlasso.datasets import unit_reduced_lasso
from svmlasso.reductions import lasso_to_svm
from svmlasso.solvers import SolverConfig, solve_svm_fw
from svmlasso.sublinear import make_entry_oracle, solve_sublinear


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="25,50,100,200", help="values of d = n_eff")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--constant", type=float, default=1.0, help="iteration count multiplier")
    args = p.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'d':>5} {'n_eff':>6} {'entries':>10} {'ratio':>7} {'success':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        inst = unit_reduced_lasso(rng, size, size // 2)
        best = np.sqrt(solve_svm_fw(lasso_to_svm(inst)[0], SolverConfig(tol=1e-10)).objective)
        entries, hits = [], 0
        for seed in range(args.seeds):
            rep = solve_sublinear(make_entry_oracle(inst), args.epsilon, SolverConfig(seed=seed),
                                  repetitions=args.repetitions, iteration_constant=args.constant)
            entries.append(rep.entries_queried)
            hits += rep.margin_estimate >= best - args.epsilon
        full = size * 2 * (size // 2)
        mean = float(np.mean(entries))
        print(f"{size:>5} {2 * (size // 2):>6} {mean:>10.0f} {mean / full:>7.2f} {hits / args.seeds:>8.2f}")


if __name__ == "__main__":
    main()
