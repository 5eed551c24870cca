import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaleval.errors import InvalidParameter, NonFiniteObjective, NotPositiveDefinite
from scaleval.numerics import (
    central_gradient,
    cholesky_log_det,
    inverse_spd,
    log_det,
    minimize,
    normal_quantile,
    student_t_quantile,
    survival,
)


def random_spd(rng, p):
    a = rng.normal(size=(p, p))
    return a @ a.T + p * np.eye(p)


def test_cholesky_reconstructs(rng):
    m = random_spd(rng, 5)
    factor, ld = cholesky_log_det(m)
    assert np.allclose(factor @ factor.T, m)
    assert np.allclose(np.triu(factor, 1), 0.0)
    assert ld == pytest.approx(np.linalg.slogdet(m)[1], rel=1e-12)


def test_cholesky_known_values():
    factor, ld = cholesky_log_det([[4.0, 2.0], [2.0, 3.0]])
    assert np.allclose(factor, [[2.0, 0.0], [1.0, math.sqrt(2.0)]])
    assert ld == pytest.approx(math.log(8.0))


def test_singular_matrix_rejected():
    with pytest.raises(NotPositiveDefinite):
        cholesky_log_det([[1.0, 1.0], [1.0, 1.0]])


def test_tiny_pivot_rejected():
    # positive definite in exact arithmetic but below the pivot floor
    with pytest.raises(NotPositiveDefinite):
        cholesky_log_det([[1.0, 1.0], [1.0, 1.0 + 1e-13]])


@pytest.mark.parametrize(
    "m",
    [np.zeros((0, 0)), np.ones((2, 3)), [[1.0, 0.5], [0.4, 1.0]], [[np.nan, 0.0], [0.0, 1.0]]],
)
def test_bad_matrices(m):
    with pytest.raises(InvalidParameter):
        cholesky_log_det(m)


def test_inverse_spd(rng):
    m = random_spd(rng, 6)
    inv = inverse_spd(m)
    assert np.allclose(inv @ m, np.eye(6), atol=1e-12)
    assert np.array_equal(inv, inv.T)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_log_det_of_inverse(p, seed):
    m = random_spd(np.random.default_rng(seed), p)
    assert log_det(m) == pytest.approx(-log_det(inverse_spd(m)), abs=1e-8)


def test_minimize_quadratic_bowl():
    res = minimize(lambda x: float(np.sum((x - 1.0) ** 2)), np.zeros(4), grad=lambda x: 2 * (x - 1.0))
    assert res.converged
    assert np.allclose(res.point, 1.0, atol=1e-6)
    assert res.objective == pytest.approx(0.0, abs=1e-12)


def test_minimize_quartic():
    res = minimize(lambda x: float(x[0] ** 4), [2.0], grad=lambda x: 4 * x**3, tol=1e-9)
    assert abs(res.point[0]) < 1e-2


def rosenbrock(x):
    return float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)


def rosenbrock_grad(x):
    return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])


def test_minimize_rosenbrock():
    res = minimize(rosenbrock, [-1.2, 1.0], grad=rosenbrock_grad, tol=1e-8)
    assert res.converged
    assert np.allclose(res.point, [1.0, 1.0], atol=1e-4)


def test_minimize_numeric_gradient():
    res = minimize(rosenbrock, [-1.2, 1.0], tol=1e-6)
    assert np.allclose(res.point, [1.0, 1.0], atol=1e-3)


def test_minimize_iteration_cap_warns():
    with pytest.warns(RuntimeWarning, match="iterations exceeded"):
        res = minimize(rosenbrock, [-1.2, 1.0], grad=rosenbrock_grad, max_iter=3)
    assert not res.converged
    assert res.iterations == 3


def test_minimize_nonfinite_start():
    with pytest.raises(NonFiniteObjective):
        minimize(lambda x: float("nan"), [0.0])


def test_minimize_steps_back_from_infinite_region():
    # log barrier: infinite for x <= 0, minimum at x = 1
    fun = lambda x: float(x[0] - math.log(x[0])) if x[0] > 0 else float("inf")  # noqa: E731
    res = minimize(fun, [5.0], grad=lambda x: np.array([1 - 1 / x[0]]), tol=1e-10)
    assert res.point[0] == pytest.approx(1.0, abs=1e-8)


def test_central_gradient_matches_analytic(rng):
    for _ in range(10):
        x = rng.uniform(-2, 2, size=2)
        assert np.allclose(central_gradient(rosenbrock, x), rosenbrock_grad(x), rtol=1e-6, atol=1e-5)


def test_survival_examples():
    assert survival("chi_square", 0.0, df=5) == 1.0
    assert survival("student_t", 1.0, df=1) == pytest.approx(0.25, abs=1e-12)
    assert survival("chi_square", 1.3863, df=2) == pytest.approx(0.5, abs=1e-4)
    assert survival("chi_square", 2 * math.log(2), df=2) == pytest.approx(0.5, abs=1e-14)
    assert survival("standard_normal", 0.0) == 0.5
    assert survival("standard_normal", 1.959963984540054) == pytest.approx(0.025, abs=1e-12)


def test_survival_t_symmetry():
    for df in (1, 3, 30):
        for x in (0.3, 1.7, 4.0):
            assert survival("student_t", -x, df=df) == pytest.approx(1 - survival("student_t", x, df=df))
    assert survival("student_t", 0.0, df=7) == 0.5


def test_survival_support_and_limits():
    assert survival("chi_square", -3.0, df=4) == 1.0
    assert survival("student_t", np.inf, df=4) == 0.0
    assert survival("student_t", -np.inf, df=4) == 1.0


@pytest.mark.parametrize("df", [0, -1, None])
def test_survival_bad_df(df):
    with pytest.raises(InvalidParameter):
        survival("chi_square", 1.0, df=df)
    with pytest.raises(InvalidParameter):
        survival("student_t", 1.0, df=df)


def test_survival_unknown_distribution():
    with pytest.raises(InvalidParameter):
        survival("gamma", 1.0, df=2)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(["chi_square", "student_t", "standard_normal"]),
    st.floats(-50, 50),
    st.floats(0, 10),
    st.integers(1, 200),
)
def test_survival_monotone(dist, x, dx, df):
    df = None if dist == "standard_normal" else df
    a, b = survival(dist, x, df=df), survival(dist, x + dx, df=df)
    assert 0.0 <= b <= a <= 1.0


def test_quantiles_invert_survival():
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-12)
    for df in (1, 5, 98):
        q = student_t_quantile(0.975, df)
        assert survival("student_t", q, df=df) == pytest.approx(0.025, rel=1e-9)


def test_no_warning_on_normal_convergence():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        minimize(lambda x: float(x @ x), np.ones(3), grad=lambda x: 2 * x)
