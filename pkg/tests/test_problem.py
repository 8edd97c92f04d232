import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from svmlasso.problem import (
    DegenerateError,
    DimensionError,
    FeasibilityError,
    LassoInstance,
    SvmInstance,
    check_l1_ball,
    check_simplex,
    duality_gap,
    is_filled_simplex,
    lasso_objective,
    lasso_subopt_bound,
    margin,
    normalize_radius,
    problem_matrix,
    svm_objective,
    svm_subopt_bound,
)
from svmlasso.solvers import SolverConfig, solve_lasso_pg, solve_svm_fw

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def test_matrix_validation():
    assert problem_matrix(np.zeros(3)).shape == (3, 1)
    with pytest.raises(DimensionError):
        problem_matrix(np.zeros((2, 2, 2)))
    with pytest.raises(DimensionError):
        problem_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        problem_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        problem_matrix([[np.inf]])
    a = problem_matrix([[1, 2], [3, 4]])
    assert a.dtype == float and not a.flags.writeable


def test_instances_are_immutable_copies():
    src = np.eye(2)
    inst = SvmInstance(src)
    src[0, 0] = 7.0
    assert inst.matrix[0, 0] == 1.0
    with pytest.raises(ValueError):
        inst.matrix[0, 0] = 3.0


def test_lasso_instance_checks():
    with pytest.raises(DimensionError):
        LassoInstance(np.eye(2), np.ones(3))
    with pytest.raises(ValueError):
        LassoInstance(np.eye(2), np.ones(2), radius=0.0)


def test_objectives_small():
    inst = SvmInstance(np.eye(2))
    assert svm_objective(inst, [0.5, 0.5]) == 0.5
    las = LassoInstance(np.eye(2), np.array([2.0, 0.0]))
    assert lasso_objective(las, [1.0, 0.0]) == 1.0
    with pytest.raises(DimensionError):
        svm_objective(inst, [1.0])


def test_margin_and_gap_identity():
    inst = SvmInstance(np.eye(2))
    rep = margin(inst, np.array([1.0, 1.0]))
    assert rep.margin == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    # at the optimum the certificate closes
    assert duality_gap(inst, [0.5, 0.5]) == pytest.approx(0.0, abs=1e-15)
    # at a vertex: ||e1|| - max(0, 0) = 1
    assert duality_gap(inst, [1.0, 0.0]) == 1.0
    with pytest.raises(DegenerateError):
        margin(inst, np.zeros(2))


def test_gap_vanishes_when_origin_in_hull():
    inst = SvmInstance(np.array([[1.0, -1.0]]))
    assert duality_gap(inst, [0.5, 0.5]) == 0.0
    assert duality_gap(inst, [1.0, 0.0]) == 1.0


def test_feasibility_checks():
    assert check_simplex([0.25, 0.75]).sum() == 1.0
    with pytest.raises(FeasibilityError):
        check_simplex([0.5, 0.6])
    with pytest.raises(FeasibilityError):
        check_simplex([-0.1, 1.1])
    with pytest.raises(FeasibilityError):
        check_l1_ball([0.7, -0.4])
    assert is_filled_simplex([0.2, 0.3])
    assert not is_filled_simplex([0.2, -0.3])


def test_normalize_radius_preserves_objective(rng):
    inst = LassoInstance(rng.standard_normal((4, 6)), rng.standard_normal(4), radius=2.5)
    unit = normalize_radius(inst)
    u = rng.uniform(-1, 1, 6)
    u /= 2 * np.abs(u).sum()
    assert lasso_objective(unit, u) == pytest.approx(lasso_objective(inst, 2.5 * u), rel=1e-13)
    assert normalize_radius(unit) is unit


@given(arrays(float, (3, 5), elements=finite), st.integers(0, 2**31))
def test_gap_is_nonnegative_and_sound(a, seed):
    """Certificate bounds the true suboptimality of the non-squared objective."""
    inst = SvmInstance(a)
    rng = np.random.default_rng(seed)
    x = rng.dirichlet(np.ones(5))
    opt = solve_svm_fw(inst, SolverConfig(tol=1e-12, max_iter=20000)).objective
    norm = np.sqrt(svm_objective(inst, x))
    gap = duality_gap(inst, x)
    assert gap >= 0.0
    assert norm - np.sqrt(max(opt, 0.0)) <= gap + 1e-7


@given(arrays(float, (3, 4), elements=finite), arrays(float, 3, elements=finite), st.integers(0, 2**31))
def test_lasso_subopt_bound_is_sound(a, b, seed):
    inst = LassoInstance(a, b)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, 4)
    x *= rng.uniform() / max(np.abs(x).sum(), 1e-300)
    opt = solve_lasso_pg(inst, SolverConfig(tol=1e-11, max_iter=200000, pg_stop="gap")).objective
    assert lasso_objective(inst, x) - opt <= lasso_subopt_bound(inst, x) + 1e-8


@given(arrays(float, (3, 4), elements=finite), st.integers(0, 2**31))
def test_svm_subopt_bound_is_sound(a, seed):
    inst = SvmInstance(a)
    x = np.random.default_rng(seed).dirichlet(np.ones(4))
    opt = solve_svm_fw(inst, SolverConfig(tol=1e-12, max_iter=20000)).objective
    assert svm_objective(inst, x) - opt <= svm_subopt_bound(inst, x) + 1e-8
