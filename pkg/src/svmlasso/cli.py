"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 no convergence within ``--max-iter``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import datasets
from .io import (
    parse_instance,
    read_matrix,
    read_report,
    sparse,
    write_matrix,
    write_report,
    write_vector,
)
from .kernel import KernelError, KernelSpec, kernel_lasso_gram, solve_kernel_lasso
from .problem import (
    LassoInstance,
    SvmInstance,
    duality_gap,
    lasso_objective,
    lasso_subopt_bound,
    normalize_radius,
    svm_objective,
    svm_subopt_bound,
)
from .reductions import (
    augment_offset,
    barycentric_contract,
    barycentric_expand,
    estimate_bigD,
    lasso_to_svm,
    offset_classifier,
    primal_from_dual,
    soft_margin_dual,
    svm_to_lasso,
    trivial_separator,
)
from .screening import screen_lasso, screen_svm
from .solvers import SolverConfig, perceptron, solve_lasso_pg, solve_svm_fw
from .sublinear import column_norm_bound, make_entry_oracle, matrix_oracle, solve_sublinear

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NOCONV = 0, 1, 2, 3
COMMANDS = ("solve-lasso", "solve-svm", "solve-svm-dual", "reduce", "verify-equivalence",
            "screen-lasso", "screen-svm", "solve-sublinear", "kernel-lasso", "bench")

log = logging.getLogger("svmlasso")


class VerificationFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    matrix: Optional[str] = None
    rhs: Optional[str] = None
    data: Optional[str] = None
    out: str = "-"
    solver: Optional[str] = None
    tol: float = 1e-8
    max_iter: int = 100_000
    seed: int = 0
    epsilon: float = 0.1
    kernel: str = "linear"
    radius: float = 1.0
    C: float = 1.0
    offset_scale: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        for name in ("tol", "epsilon", "radius", "C"):
            if not getattr(self, name) > 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.max_iter < 1:
            raise ValueError("--max-iter must be >= 1")
        if self.offset_scale is not None and not self.offset_scale > 0:
            raise ValueError("--offset-scale must be positive")

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_iter=self.max_iter, seed=self.seed)


# helpers ---------------------------------------------------------------------

def _need(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required for this command")
    return value


def _lasso(cfg: RunConfig) -> LassoInstance:
    return parse_instance(_need(cfg.matrix, "--matrix"), "lasso", _need(cfg.rhs, "--rhs"), cfg.radius)


def _svm(cfg: RunConfig):
    """SVM instance from ``--matrix``, or the soft-margin dual of ``--data``."""
    if cfg.data is not None:
        data = parse_instance(cfg.data, "labeled", C=cfg.C)
        if cfg.offset_scale is not None:
            data = augment_offset(data, cfg.offset_scale)
        return soft_margin_dual(data), data
    return parse_instance(_need(cfg.matrix, "--matrix"), "svm"), None


def _solve_lasso(inst: LassoInstance, cfg: SolverConfig, solver: str = "pg"):
    """Solve at any radius; returns (x in original scale, solver report)."""
    unit = normalize_radius(inst)
    if solver == "fw":
        svm, _ = lasso_to_svm(unit)
        rep = solve_svm_fw(svm, cfg)
        u = barycentric_contract(rep.solution)
    elif solver == "pg":
        rep = solve_lasso_pg(unit, cfg)
        u = rep.solution
    else:
        raise ValueError(f"unknown Lasso solver {solver!r}")
    return inst.radius * u, rep


def _lasso_report(inst: LassoInstance, x, rep, solver: str) -> dict:
    return {
        "objective": lasso_objective(inst, x),
        "gap": lasso_subopt_bound(inst, x),
        "n": inst.n,
        "solution": sparse(x),
        "iterations": rep.iterations,
        "converged": rep.converged,
        "solver": solver,
    }


def _svm_report(inst: SvmInstance, rep) -> dict:
    x = rep.solution
    return {
        "objective": svm_objective(inst, x),
        "gap": duality_gap(inst, x),
        "n": inst.n,
        "solution": sparse(x),
        "support_size": int(np.count_nonzero(x)),
        "iterations": rep.iterations,
        "converged": rep.converged,
        "solver": "fw",
    }


# commands --------------------------------------------------------------------

def cmd_solve_lasso(cfg: RunConfig) -> dict:
    inst = _lasso(cfg)
    solver = cfg.solver or "pg"
    kept_path = cfg.extra.get("only_kept")
    if kept_path:
        screen = read_report(kept_path)
        kept = [int(i) for i in screen["kept"]]
        if int(screen.get("n", inst.n)) != inst.n or any(not 0 <= i < inst.n for i in kept):
            raise ValueError("screening report does not match this instance")
        sub = LassoInstance(inst.matrix[:, kept], inst.rhs, inst.radius)
        xs, rep = _solve_lasso(sub, cfg.solver_config, solver)
        x = np.zeros(inst.n)
        x[kept] = xs
        out = _lasso_report(inst, x, rep, solver)
        out["kept"] = kept
        return out
    x, rep = _solve_lasso(inst, cfg.solver_config, solver)
    return _lasso_report(inst, x, rep, solver)


def cmd_solve_svm(cfg: RunConfig) -> dict:
    inst, _ = _svm(cfg)
    if (cfg.solver or "fw") == "perceptron":
        sep = perceptron(inst, cfg.solver_config)
        return {"direction": sep.direction, "margin": sep.margin, "solver": "perceptron",
                "converged": True}
    if cfg.solver not in (None, "fw"):
        raise ValueError(f"unknown SVM solver {cfg.solver!r}")
    return _svm_report(inst, solve_svm_fw(inst, cfg.solver_config))


def cmd_solve_svm_dual(cfg: RunConfig) -> dict:
    inst, data = _svm(cfg)
    if data is None:
        raise ValueError("--data is required for this command")
    rep = solve_svm_fw(inst, cfg.solver_config)
    out = _svm_report(inst, rep)
    primal = primal_from_dual(data, rep.solution)
    out.update({
        "C": data.C,
        "w": primal["w"],
        "rho": primal["rho"],
        "xi": primal["xi"],
        "primal_value": primal["value"],
        "duality_residual": primal["value"] + 0.5 * out["objective"],
    })
    if cfg.offset_scale is not None:
        weights, offset = offset_classifier(data, rep.solution, cfg.offset_scale)
        out["weights"], out["offset"] = weights, offset
    return out


def cmd_reduce(cfg: RunConfig) -> dict:
    direction = cfg.extra.get("direction") or "lasso-to-svm"
    out_matrix = _need(cfg.extra.get("out_matrix"), "--out-matrix")
    if direction == "lasso-to-svm":
        inst = normalize_radius(_lasso(cfg))
        svm, meta = lasso_to_svm(inst)
        write_matrix(out_matrix, svm.matrix)
        return {"direction": direction, "d": svm.d, "n": svm.n, "source_n": meta.source_n}
    if direction != "svm-to-lasso":
        raise ValueError(f"unknown direction {direction!r}")
    out_rhs = _need(cfg.extra.get("out_rhs"), "--out-rhs")
    inst, data = _svm(cfg)
    if data is not None:
        sep = trivial_separator(data.points.shape[1], data.C, data.points.shape[0])
        source = "trivial"
    else:
        sep = perceptron(inst, cfg.solver_config)
        source = "perceptron"
    if not sep.margin > 0:
        raise VerificationFailure(f"no weakly separating direction found (margin {sep.margin:.3e})")
    bigD = estimate_bigD(inst, cfg.extra.get("eta", 0.01))
    lasso, meta = svm_to_lasso(inst, sep, bigD)
    write_matrix(out_matrix, lasso.matrix)
    write_vector(out_rhs, lasso.rhs)
    return {"direction": direction, "d": lasso.d, "n": lasso.n, "sigma": meta.sigma,
            "bigD": meta.bigD, "separator": source}


def _verify_lasso_to_svm(inst: LassoInstance, cfg: RunConfig) -> dict:
    tight = SolverConfig(tol=min(cfg.tol, 1e-10), max_iter=max(cfg.max_iter, 10**6),
                         seed=cfg.seed, pg_stop="gap")
    inst = normalize_radius(inst)
    pg = solve_lasso_pg(inst, tight)
    svm, _ = lasso_to_svm(inst)
    fw = solve_svm_fw(svm, tight)
    point = barycentric_expand(pg.solution)
    return {"lasso_value": pg.objective, "svm_value": fw.objective,
            "pointwise_delta": abs(lasso_objective(inst, pg.solution) - svm_objective(svm, point)),
            "delta": abs(pg.objective - fw.objective),
            "converged": pg.converged and fw.converged}


def _verify_svm_to_lasso(inst: SvmInstance, sep, cfg: RunConfig) -> dict:
    tight = SolverConfig(tol=min(cfg.tol, 1e-9), max_iter=max(cfg.max_iter, 10**6),
                         seed=cfg.seed, pg_stop="gap")
    lasso, meta = svm_to_lasso(inst, sep, estimate_bigD(inst))
    fw = solve_svm_fw(inst, tight)
    pg = solve_lasso_pg(lasso, tight)
    x = pg.solution
    return {"svm_value": fw.objective, "lasso_value": pg.objective,
            "delta": abs(fw.objective - pg.objective),
            "simplex_violation": float(max(np.abs(x.sum() - 1.0), -min(x.min(), 0.0))),
            "sigma": meta.sigma, "bigD": meta.bigD,
            "converged": pg.converged and fw.converged}


def cmd_verify_equivalence(cfg: RunConfig) -> dict:
    direction = cfg.extra.get("direction") or "lasso-to-svm"
    check = cfg.extra.get("check_tol", 1e-8)
    rng = np.random.default_rng(cfg.seed)
    if direction == "lasso-to-svm":
        inst = _lasso(cfg) if cfg.matrix else datasets.random_lasso(rng, 8, 8)
        out = _verify_lasso_to_svm(inst, cfg)
    elif direction == "svm-to-lasso":
        if cfg.data or cfg.matrix:
            inst, data = _svm(cfg)
        else:
            data = datasets.random_labeled(rng, 4, 5, cfg.C)
            inst = soft_margin_dual(data)
        sep = (trivial_separator(data.points.shape[1], data.C, data.points.shape[0])
               if data is not None else perceptron(inst, cfg.solver_config))
        if not sep.margin > 0:
            raise VerificationFailure("no weakly separating direction found")
        out = _verify_svm_to_lasso(inst, sep, cfg)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    out.update({"direction": direction, "check_tol": check})
    out["passed"] = bool(out["delta"] <= check and out.get("simplex_violation", 0.0) <= check)
    return out


def _reference_lasso(inst: LassoInstance, cfg: RunConfig):
    ref = cfg.extra.get("reference")
    if ref:
        rep = read_report(ref)
        x = np.zeros(inst.n)
        for i, v in rep["solution"]:
            x[int(i)] = float(v)
        return x
    x, _ = _solve_lasso(inst, SolverConfig(tol=cfg.tol, max_iter=cfg.max_iter, seed=cfg.seed,
                                           pg_stop="gap"))
    return x


def cmd_screen_lasso(cfg: RunConfig) -> dict:
    inst = _lasso(cfg)
    x = _reference_lasso(inst, cfg)
    subopt = lasso_subopt_bound(inst, x)
    rep = screen_lasso(inst, x, subopt)
    return {"n": inst.n, "kept": rep.kept, "discarded": rep.discarded, "radius_used": rep.radius_used,
            "reference_objective": rep.reference_objective, "subopt_bound": subopt}


def cmd_screen_svm(cfg: RunConfig) -> dict:
    inst, _ = _svm(cfg)
    fw = solve_svm_fw(inst, cfg.solver_config)
    subopt = svm_subopt_bound(inst, fw.solution)
    rep = screen_svm(inst, fw.solution, subopt)
    return {"n": inst.n, "kept": rep.kept, "discarded": rep.discarded, "radius_used": rep.radius_used,
            "reference_objective": rep.reference_objective, "subopt_bound": subopt}


def cmd_solve_sublinear(cfg: RunConfig) -> dict:
    if cfg.rhs:
        inst = normalize_radius(_lasso(cfg))
        oracle = make_entry_oracle(inst)
        bound = column_norm_bound(inst.matrix, inst.rhs)
    else:
        a = read_matrix(_need(cfg.matrix, "--matrix"))
        oracle = matrix_oracle(a)
        bound = column_norm_bound(a)
    if bound == 0.0:
        raise ValueError("all columns are zero")
    reps = cfg.extra.get("repetitions", 5)
    rep = solve_sublinear(oracle, cfg.epsilon, cfg.solver_config, repetitions=reps, norm_bound=bound)
    return {"direction": rep.direction, "margin_estimate": rep.margin_estimate,
            "entries_queried": rep.entries_queried, "verification_entries": rep.verification_entries,
            "epsilon": rep.epsilon, "norm_bound": bound, "repetitions": rep.repetitions,
            "iterations_per_repetition": rep.iterations, "d": oracle.d, "n_eff": oracle.n_eff,
            "full_matrix_entries": oracle.d * oracle.n_eff, "converged": True}


def cmd_kernel_lasso(cfg: RunConfig) -> dict:
    spec = KernelSpec.parse(cfg.kernel, loader=read_matrix)
    if spec.kind == "precomputed":
        gram = kernel_lasso_gram(None, None, spec)
    else:
        inst = _lasso(cfg)
        if inst.radius != 1.0:
            raise ValueError("the kernel Lasso is defined on the unit l1 ball")
        gram = kernel_lasso_gram(inst.matrix, inst.rhs, spec)
    rep = solve_kernel_lasso(gram, cfg.solver_config)
    return {"kernel": cfg.kernel, "objective": rep.objective, "gap": rep.gap, "n": 2 * gram.n,
            "solution": sparse(rep.solution), "coefficients": sparse(rep.extras["coefficients"]),
            "iterations": rep.iterations, "converged": rep.converged}


def _bench_one(args) -> dict:
    size, seed, tol = args
    rng = np.random.default_rng([seed, size])
    inst = datasets.random_lasso(rng, size, size)
    cfg = SolverConfig(tol=tol, max_iter=10**6, seed=seed, pg_stop="gap")
    t0 = time.perf_counter()
    pg = solve_lasso_pg(inst, cfg)
    t1 = time.perf_counter()
    fw = solve_svm_fw(lasso_to_svm(inst)[0], SolverConfig(tol=tol, max_iter=10**6, seed=seed))
    t2 = time.perf_counter()
    return {"size": size, "seed": seed, "pg_value": pg.objective, "fw_value": fw.objective,
            "delta": abs(pg.objective - fw.objective), "pg_seconds": t1 - t0, "fw_seconds": t2 - t1,
            "pg_iterations": pg.iterations, "fw_iterations": fw.iterations}


def cmd_bench(cfg: RunConfig) -> dict:
    sizes = cfg.extra.get("sizes") or [10, 20, 40]
    repeats = cfg.extra.get("repeats", 3)
    jobs = cfg.extra.get("jobs", 1)
    check = cfg.extra.get("check_tol", 1e-7)
    tasks = [(s, cfg.seed + r, min(cfg.tol, 1e-10)) for s in sizes for r in range(repeats)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    worst = max(r["delta"] for r in rows)
    return {"runs": rows, "worst_delta": worst, "check_tol": check, "passed": worst <= check,
            "converged": True}


HANDLERS = {
    "solve-lasso": cmd_solve_lasso,
    "solve-svm": cmd_solve_svm,
    "solve-svm-dual": cmd_solve_svm_dual,
    "reduce": cmd_reduce,
    "verify-equivalence": cmd_verify_equivalence,
    "screen-lasso": cmd_screen_lasso,
    "screen-svm": cmd_screen_svm,
    "solve-sublinear": cmd_solve_sublinear,
    "kernel-lasso": cmd_kernel_lasso,
    "bench": cmd_bench,
}


def run(cfg: RunConfig) -> int:
    """Execute one command, write its report, return the exit code."""
    t0 = time.perf_counter()
    try:
        report = HANDLERS[cfg.command](cfg)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, OSError, KernelError, IndexError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"command": cfg.command, "seed": cfg.seed, "timing_seconds": time.perf_counter() - t0,
              **report}
    write_report(cfg.out, report)
    if report.get("passed") is False:
        return EXIT_VERIFY
    if report.get("converged") is False:
        return EXIT_NOCONV
    return EXIT_OK


# argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--max-iter", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default="-", help="report path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    lasso_in = argparse.ArgumentParser(add_help=False)
    lasso_in.add_argument("--matrix", help="CSV matrix")
    lasso_in.add_argument("--rhs", help="right-hand side, one value per line")
    lasso_in.add_argument("--radius", type=float, default=1.0)

    svm_in = argparse.ArgumentParser(add_help=False)
    svm_in.add_argument("--matrix", help="CSV matrix whose columns are the points")
    svm_in.add_argument("--data", help="labeled points (soft-margin dual is built)")
    svm_in.add_argument("-C", "--C", dest="C", type=float, default=1.0)
    svm_in.add_argument("--offset-scale", type=float, default=None,
                        help="append a constant feature with this value")

    p = argparse.ArgumentParser(prog="svmlasso", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-lasso", parents=[common, lasso_in])
    s.add_argument("--solver", choices=("pg", "fw"), default="pg")
    s.add_argument("--only-kept", help="screening report; solve on its kept columns only")

    s = sub.add_parser("solve-svm", parents=[common, svm_in])
    s.add_argument("--solver", choices=("fw", "perceptron"), default="fw")

    sub.add_parser("solve-svm-dual", parents=[common, svm_in])

    s = sub.add_parser("reduce", parents=[common])
    s.add_argument("--direction", choices=("lasso-to-svm", "svm-to-lasso"), default="lasso-to-svm")
    s.add_argument("--matrix")
    s.add_argument("--rhs")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--data")
    s.add_argument("-C", "--C", dest="C", type=float, default=1.0)
    s.add_argument("--offset-scale", type=float, default=None)
    s.add_argument("--eta", type=float, default=0.01, help="bigD = (1 + eta) * max column norm")
    s.add_argument("--out-matrix", required=True)
    s.add_argument("--out-rhs")

    s = sub.add_parser("verify-equivalence", parents=[common])
    s.add_argument("--direction", choices=("lasso-to-svm", "svm-to-lasso"), default="lasso-to-svm")
    s.add_argument("--matrix")
    s.add_argument("--rhs")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--data")
    s.add_argument("-C", "--C", dest="C", type=float, default=1.0)
    s.add_argument("--offset-scale", type=float, default=None)
    s.add_argument("--check-tol", type=float, default=1e-8)

    s = sub.add_parser("screen-lasso", parents=[common, lasso_in])
    s.add_argument("--reference", help="solve report whose solution is the reference point")

    sub.add_parser("screen-svm", parents=[common, svm_in])

    s = sub.add_parser("solve-sublinear", parents=[common])
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", help="if given, run on the reduced Lasso instance")
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--repetitions", type=int, default=5)

    s = sub.add_parser("kernel-lasso", parents=[common, lasso_in])
    s.add_argument("--kernel", default="linear",
                   help="linear | poly:DEG:COEF0 | rbf:GAMMA | precomputed:PATH")

    s = sub.add_parser("bench", parents=[common])
    s.add_argument("--sizes", default="10,20,40", help="comma-separated square sizes")
    s.add_argument("--repeats", type=int, default=3)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--check-tol", type=float, default=1e-7)
    return p


EXTRA_KEYS = ("only_kept", "direction", "out_matrix", "out_rhs", "eta", "check_tol", "reference",
              "repetitions", "repeats", "jobs")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in EXTRA_KEYS if getattr(ns, k, None) is not None}
    if getattr(ns, "sizes", None):
        extra["sizes"] = [int(t) for t in ns.sizes.split(",") if t.strip()]
    return RunConfig(
        command=ns.command,
        matrix=getattr(ns, "matrix", None),
        rhs=getattr(ns, "rhs", None),
        data=getattr(ns, "data", None),
        out=ns.out,
        solver=getattr(ns, "solver", None),
        tol=ns.tol,
        max_iter=ns.max_iter,
        seed=ns.seed,
        epsilon=getattr(ns, "epsilon", 0.1),
        kernel=getattr(ns, "kernel", "linear"),
        radius=getattr(ns, "radius", 1.0),
        C=getattr(ns, "C", 1.0),
        offset_scale=getattr(ns, "offset_scale", None),
        extra=extra,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
