import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from svmlasso.datasets import random_labeled, random_lasso, random_svm
from svmlasso.problem import LassoInstance, SvmInstance, duality_gap, svm_objective
from svmlasso.reductions import (
    LabeledData,
    estimate_bigD,
    lasso_to_svm,
    soft_margin_dual,
    svm_to_lasso,
    trivial_separator,
)
from svmlasso.solvers import (
    SolverConfig,
    perceptron,
    power_iteration,
    project_l1,
    solve_gram_fw,
    solve_lasso_pg,
    solve_svm_fw,
)

TIGHT = SolverConfig(tol=1e-12, max_iter=200_000)
TIGHT_PG = SolverConfig(tol=1e-12, max_iter=500_000, pg_stop="gap")


def project_l1_bisection(v, radius=1.0):
    """Independent projection oracle: bisect on the soft-threshold level."""
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= radius:
        return v.copy()
    lo, hi = 0.0, np.abs(v).max()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.maximum(np.abs(v) - mid, 0).sum() > radius:
            lo = mid
        else:
            hi = mid
    return np.sign(v) * np.maximum(np.abs(v) - 0.5 * (lo + hi), 0)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iter=0)
    with pytest.raises(ValueError):
        SolverConfig(step_rule="armijo")
    with pytest.raises(ValueError):
        SolverConfig(pg_stop="never")


def test_fw_identity():
    rep = solve_svm_fw(SvmInstance(np.eye(2)), SolverConfig(tol=1e-10))
    assert rep.converged and rep.gap <= 1e-10
    np.testing.assert_allclose(rep.solution, [0.5, 0.5], atol=1e-9)
    assert rep.objective == pytest.approx(0.5, abs=1e-12)


def test_fw_soft_margin_pair():
    data = LabeledData(np.array([[1.0, -1.0], [0.0, 0.0]]), np.array([1.0, -1.0]), 1.0)
    inst = soft_margin_dual(data)
    np.testing.assert_allclose(inst.matrix.T @ inst.matrix, [[2, 1], [1, 2]], atol=1e-15)
    rep = solve_svm_fw(inst, SolverConfig(tol=1e-10))
    assert rep.objective == pytest.approx(1.5, abs=1e-12)
    np.testing.assert_allclose(rep.solution, [0.5, 0.5], atol=1e-9)


def test_fw_starts_at_lowest_index_minimum_norm():
    a = np.array([[2.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
    rep = solve_svm_fw(SvmInstance(a), SolverConfig(max_iter=1))
    assert rep.solution[1] == 1.0


def test_fw_reports_nonconvergence():
    inst = random_svm(np.random.default_rng(0), 10, 30, shift=0.3)
    rep = solve_svm_fw(inst, SolverConfig(tol=1e-14, max_iter=3))
    assert not rep.converged and rep.iterations == 3
    assert rep.gap == pytest.approx(duality_gap(inst, rep.solution), abs=0)


def test_fw_objective_monotone():
    inst = random_svm(np.random.default_rng(1), 6, 15, shift=0.4)
    vals = [solve_svm_fw(inst, SolverConfig(max_iter=k)).objective for k in range(1, 60)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_fw_schedule_step_rule():
    inst = random_svm(np.random.default_rng(2), 5, 8, shift=0.5)
    ref = solve_svm_fw(inst, TIGHT).objective
    rep = solve_svm_fw(inst, SolverConfig(step_rule="2/(k+2)", tol=1e-3, max_iter=200_000))
    assert rep.objective - ref < 5e-3


def test_gram_fw_matches_feature_fw(rng):
    inst = random_svm(rng, 7, 12, shift=0.2)
    a = solve_svm_fw(inst, TIGHT)
    g = solve_gram_fw(inst.matrix.T @ inst.matrix, TIGHT)
    assert abs(a.objective - g.objective) < 1e-10
    assert g.objective == pytest.approx(svm_objective(inst, g.solution), abs=1e-12)


def test_fw_without_away_steps_still_converges(rng):
    inst = random_svm(rng, 4, 6, shift=1.0)
    ref = solve_svm_fw(inst, TIGHT).objective
    plain = solve_svm_fw(inst, SolverConfig(tol=1e-6, away_steps=False, max_iter=10**6))
    assert plain.objective - ref < 1e-5


def test_pg_examples():
    rep = solve_lasso_pg(LassoInstance(np.eye(2), np.array([2.0, 0.0])), SolverConfig(tol=1e-10))
    np.testing.assert_allclose(rep.solution, [1.0, 0.0], atol=1e-10)
    assert rep.objective == pytest.approx(1.0, abs=1e-12)
    rep = solve_lasso_pg(LassoInstance(np.eye(2), np.zeros(2)), SolverConfig(tol=1e-10))
    np.testing.assert_allclose(rep.solution, 0.0, atol=1e-12)
    assert rep.objective == pytest.approx(0.0, abs=1e-20)


def test_pg_zero_matrix():
    rep = solve_lasso_pg(LassoInstance(np.zeros((2, 3)), np.array([1.0, 2.0])))
    assert rep.objective == 5.0 and rep.converged


def test_pg_requires_unit_radius():
    with pytest.raises(ValueError):
        solve_lasso_pg(LassoInstance(np.eye(2), np.ones(2), radius=2.0))


def test_pg_plain_and_accelerated_agree(rng):
    inst = random_lasso(rng, 8, 12)
    fast = solve_lasso_pg(inst, TIGHT_PG)
    slow = solve_lasso_pg(inst, SolverConfig(tol=1e-11, max_iter=10**6, accelerated=False, pg_stop="gap"))
    assert abs(fast.objective - slow.objective) < 1e-10


def test_pg_converges_on_large_scale_constructed_instances():
    # large rhs: the cached residuals drift and the objective is flat to rounding
    rng = np.random.default_rng(2024)
    for k in range(8):
        d, n = int(rng.integers(1, 31)), int(rng.integers(2, 31))
        C = (0.1, 1.0, 10.0)[k % 3]
        data = random_labeled(rng, d, n, C, separation=0.0)
        inst = soft_margin_dual(data)
        lasso, _ = svm_to_lasso(inst, trivial_separator(n, C, d), estimate_bigD(inst))
        pg = solve_lasso_pg(lasso, SolverConfig(tol=1e-9, max_iter=100_000, pg_stop="gap"))
        assert pg.converged
        fw = solve_svm_fw(inst, SolverConfig(tol=1e-12))
        assert abs(pg.objective - fw.objective) <= 1e-9


def test_power_iteration_matches_eigvalsh(rng):
    a = rng.standard_normal((9, 5))
    assert power_iteration(a, 500) == pytest.approx(np.linalg.eigvalsh(a.T @ a).max(), rel=1e-6)


def test_cross_solver_random_10x20():
    inst = random_lasso(np.random.default_rng(10), 10, 20)
    pg = solve_lasso_pg(inst, TIGHT_PG)
    fw = solve_svm_fw(lasso_to_svm(inst)[0], SolverConfig(tol=1e-10))
    assert fw.gap <= 1e-10
    assert abs(pg.objective - fw.objective) <= 1e-7


def test_project_l1_examples():
    np.testing.assert_array_equal(project_l1([0.3, -0.2]), [0.3, -0.2])
    np.testing.assert_allclose(project_l1([2.0, 0.0]), [1.0, 0.0])
    np.testing.assert_allclose(project_l1([3.0, -3.0], 2.0), [1.0, -1.0])


vecs = arrays(float, st.integers(1, 12), elements=st.floats(-10, 10, allow_nan=False))


@given(vecs)
def test_project_l1_matches_bisection(v):
    p = project_l1(v)
    assert np.abs(p).sum() <= 1 + 1e-12
    np.testing.assert_allclose(p, project_l1_bisection(v), atol=1e-9)


@given(vecs)
def test_project_l1_idempotent(v):
    p = project_l1(v)
    np.testing.assert_allclose(project_l1(p), p, atol=1e-15)


@given(vecs, st.integers(0, 2**31))
def test_project_l1_is_nearest(v, seed):
    p = project_l1(v)
    rng = np.random.default_rng(seed)
    for _ in range(20):
        z = rng.standard_normal(v.shape)
        z = z * rng.uniform() / np.abs(z).sum()
        assert np.linalg.norm(v - p) <= np.linalg.norm(v - z) + 1e-12


def test_perceptron_identity():
    rep = perceptron(SvmInstance(np.eye(2)), SolverConfig(max_iter=2000))
    sigma_star = 1 / np.sqrt(2)
    assert rep.margin >= sigma_star - 0.1
    assert rep.margin <= sigma_star + 1e-12


def test_perceptron_single_column():
    rep = perceptron(SvmInstance(np.array([[1.0], [0.0]])), SolverConfig(max_iter=1))
    np.testing.assert_array_equal(rep.direction, [1.0, 0.0])
    assert rep.margin == 1.0


def test_perceptron_beats_trivial_on_soft_margin(rng):
    pts = rng.uniform(-1, 1, (3, 6))
    data = LabeledData(pts, np.array([1, -1, 1, -1, 1, -1.0]), C=1.0)
    inst = soft_margin_dual(data)
    rep = perceptron(inst, SolverConfig(max_iter=5000))
    assert rep.margin > trivial_separator(6, 1.0, 3).margin


def test_perceptron_direction_in_column_span(rng):
    # tall matrix, so the column span is a proper subspace
    inst = random_svm(rng, 9, 4, shift=2.0)
    rep = perceptron(inst, SolverConfig(max_iter=50))
    # w is a combination of columns, so the system is consistent
    x, *_ = np.linalg.lstsq(inst.matrix, rep.direction, rcond=None)
    assert np.linalg.norm(inst.matrix @ x - rep.direction) < 1e-10


@given(st.integers(0, 2**31))
def test_fw_gap_certificate_against_pg(seed):
    rng = np.random.default_rng(seed)
    inst = random_lasso(rng, 4, 5)
    svm = lasso_to_svm(inst)[0]
    opt = solve_lasso_pg(inst, TIGHT_PG).objective
    for k in (1, 3, 10):
        rep = solve_svm_fw(svm, SolverConfig(max_iter=k))
        m = max(0.0, np.sqrt(rep.objective) - rep.gap)
        assert rep.objective - opt <= rep.objective - m * m + 1e-9
