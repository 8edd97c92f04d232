import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svmlasso.datasets import random_lasso
from svmlasso.kernel import (
    KernelError,
    KernelLassoGram,
    KernelSpec,
    kernel_eval,
    kernel_lasso_gram,
    kernel_matrix,
    kernel_svm_gram,
    point_kernel,
    solve_kernel_lasso,
)
from svmlasso.problem import DimensionError
from svmlasso.reductions import lasso_to_svm
from svmlasso.solvers import SolverConfig, solve_svm_fw

TIGHT = SolverConfig(tol=1e-12, max_iter=500_000)


def test_spec_validation():
    with pytest.raises(KernelError):
        KernelSpec("sigmoid")
    with pytest.raises(KernelError):
        KernelSpec("polynomial", degree=0)
    with pytest.raises(KernelError):
        KernelSpec("rbf", gamma=0.0)
    with pytest.raises(KernelError):
        KernelSpec("precomputed")
    with pytest.raises(KernelError):
        KernelSpec("precomputed", matrix=np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(KernelError):
        KernelSpec("precomputed", matrix=np.ones((2, 3)))


def test_spec_parse():
    assert KernelSpec.parse("linear").kind == "linear"
    p = KernelSpec.parse("poly:3:1.5")
    assert (p.kind, p.degree, p.coef0) == ("polynomial", 3, 1.5)
    assert KernelSpec.parse("rbf:0.25").gamma == 0.25
    pre = KernelSpec.parse("precomputed:x", loader=lambda path: np.eye(3))
    assert pre.matrix.shape == (3, 3)
    with pytest.raises(KernelError):
        KernelSpec.parse("cubic")


def test_kernel_eval_examples():
    assert kernel_eval(KernelSpec("linear"), [1, 0], [1, 0]) == 1.0
    assert kernel_eval(KernelSpec("rbf", gamma=3.0), [0.3, -2], [0.3, -2]) == 1.0
    assert kernel_eval(KernelSpec("polynomial", degree=2), [1, 1], [1, -1]) == 0.0
    assert kernel_eval(KernelSpec("polynomial", degree=2, coef0=1.0), [1, 2], [3, 1]) == 36.0
    assert kernel_eval(KernelSpec("rbf", gamma=0.5), [0, 0], [1, 1]) == pytest.approx(np.exp(-1.0))
    with pytest.raises(DimensionError):
        kernel_eval(KernelSpec("linear"), [1, 0], [1, 0, 0])


def test_linear_gram_matches_reduction(rng):
    inst = random_lasso(rng, 4, 6)
    g = kernel_lasso_gram(inst.matrix, inst.rhs, KernelSpec("linear"))
    red = lasso_to_svm(inst)[0].matrix
    np.testing.assert_allclose(g.gram, red.T @ red, atol=1e-12, rtol=0)
    assert g.signs.tolist() == [1.0] * 6 + [-1.0] * 6


def test_point_on_target_has_zero_norm():
    b = np.array([0.3, -1.2])
    g = kernel_lasso_gram(b[:, None], b, KernelSpec("linear"))
    assert g.gram[0, 0] == 0.0


@pytest.mark.parametrize("spec", [KernelSpec("rbf", gamma=1.0), KernelSpec("polynomial", degree=3, coef0=1.0),
                                  KernelSpec("linear")])
def test_builtin_grams_symmetric_psd(spec):
    rng = np.random.default_rng(4)
    for _ in range(10):
        inst = random_lasso(rng, 3, 5)
        k = kernel_lasso_gram(inst.matrix, inst.rhs, spec).gram
        np.testing.assert_array_equal(k, k.T)
        assert np.linalg.eigvalsh(k).min() >= -1e-8 * max(1.0, np.abs(k).max())


def test_rbf_matches_feature_formula(rng):
    """Four-term formula against direct kernel evaluation of differences."""
    a, b = rng.standard_normal((3, 4)), rng.standard_normal(3)
    spec = KernelSpec("rbf", gamma=0.7)
    g = kernel_lasso_gram(a, b, spec).gram
    pts = np.column_stack([a, b])
    k = kernel_matrix(spec, pts, pts)
    s = [1, 1, 1, 1, -1, -1, -1, -1]
    for u in range(8):
        for v in range(8):
            i, j = u % 4, v % 4
            want = s[u] * s[v] * k[i, j] - s[u] * k[i, 4] - s[v] * k[j, 4] + k[4, 4]
            assert g[u, v] == pytest.approx(want, abs=1e-14)


def test_precomputed_path_equals_builtin(rng):
    a, b = rng.standard_normal((3, 4)), rng.standard_normal(3)
    spec = KernelSpec("rbf", gamma=0.3)
    pre = KernelSpec("precomputed", matrix=point_kernel(a, b, spec))
    np.testing.assert_array_equal(kernel_lasso_gram(None, None, pre).gram, kernel_lasso_gram(a, b, spec).gram)


def test_non_psd_precomputed_rejected():
    m = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(KernelError):
        kernel_lasso_gram(None, None, KernelSpec("precomputed", matrix=m))


def test_solve_kernel_lasso_examples():
    g = kernel_lasso_gram(np.eye(2), np.array([0.5, 0.5]), KernelSpec("linear"))
    rep = solve_kernel_lasso(g, SolverConfig(tol=1e-10))
    assert rep.objective == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(rep.extras["coefficients"], [0.5, 0.5], atol=1e-12)

    ident = KernelLassoGram(np.eye(2), np.array([1.0, -1.0]))
    rep = solve_kernel_lasso(ident, SolverConfig(tol=1e-10))
    assert rep.objective == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(rep.solution, [0.5, 0.5], atol=1e-9)


def test_solve_kernel_lasso_rejects_asymmetric():
    bad = KernelLassoGram(np.array([[1.0, 0.5], [0.0, 1.0]]), np.array([1.0, -1.0]))
    with pytest.raises(KernelError):
        solve_kernel_lasso(bad)


def test_rbf_objective_reevaluates(rng):
    inst = random_lasso(rng, 3, 5)
    g = kernel_lasso_gram(inst.matrix, inst.rhs, KernelSpec("rbf", gamma=1.0))
    rep = solve_kernel_lasso(g, SolverConfig(tol=1e-9))
    assert rep.objective == pytest.approx(float(rep.solution @ g.gram @ rep.solution), abs=1e-12)


@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**31))
def test_gram_form_equals_feature_form(d, n, seed):
    rng = np.random.default_rng(seed)
    inst = random_lasso(rng, d, n)
    g = kernel_lasso_gram(inst.matrix, inst.rhs, KernelSpec("linear"))
    red = lasso_to_svm(inst)[0].matrix
    x = rng.dirichlet(np.ones(2 * n))
    w = red @ x
    assert float(x @ g.gram @ x) == pytest.approx(float(w @ w), abs=1e-12)


def test_linear_kernel_optimum_matches_explicit(rng):
    inst = random_lasso(rng, 5, 7)
    g = kernel_lasso_gram(inst.matrix, inst.rhs, KernelSpec("linear"))
    a = solve_kernel_lasso(g, TIGHT)
    b = solve_svm_fw(lasso_to_svm(inst)[0], TIGHT)
    assert abs(a.objective - b.objective) <= 1e-9


def test_kernel_svm_gram(rng):
    pts, y = rng.standard_normal((3, 4)), np.array([1.0, -1.0, 1.0, -1.0])
    k = kernel_svm_gram(pts, y, KernelSpec("linear"), C=2.0)
    z = pts * y
    np.testing.assert_allclose(k, z.T @ z + np.eye(4) / 2.0, atol=1e-14)
