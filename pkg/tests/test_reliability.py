import warnings

import numpy as np
import pytest

from scaleval.cfa import CfaModel, CfaSolution, FitIndices, build_model, fit_indices, fit_ml, model_from_groups
from scaleval.data import ScaleSpec
from scaleval.errors import DegenerateVariance, LengthMismatch, TooFewItems, UnfittedSolution, UnknownFactor, ZeroVariance
from scaleval.reliability import alpha_conditions, cronbach_alpha, icc_test_retest, omega, reliability_table
from scaleval.synthetic import population_covariance, sample_continuous, sample_responses, standardized_model
from scaleval.thresholds import DEFAULT_THRESHOLDS

# single-factor loadings of the published 16-item fit
PUBLISHED_1F = [0.567, 0.623, 0.753, 0.794, 0.759, 0.663, 0.762, 0.824,
                0.697, 0.819, 0.740, 0.677, 0.691, 0.780, 0.812, 0.838]


def solution(lam, theta, groups=None):
    lam = np.asarray(lam, dtype=float)
    groups = groups or [0] * lam.size
    k = max(groups) + 1
    # built directly: a lone 2-item factor is a valid container for omega even though it cannot be fitted
    model = CfaModel(tuple(f"x{i}" for i in range(lam.size)), tuple(f"F{j}" for j in range(k)), tuple(groups))
    return CfaSolution(model, lam, np.eye(k), np.asarray(theta, dtype=float), 0.0, 100)


def fit_of(cfi, tli, rmsea, srmr):
    return FitIndices(0.0, 104, 0.0, 0.0, 120, cfi, tli, rmsea, srmr)


def test_alpha_examples():
    assert cronbach_alpha(np.array([[1, 1], [2, 2], [4, 4]])) == pytest.approx(1.0)
    assert cronbach_alpha(np.array([[1, 2], [2, 1], [3, 4], [4, 3]])) == pytest.approx(0.75)
    # centered columns are orthogonal, so the covariance term vanishes
    assert cronbach_alpha(np.array([[1, 2], [2, 4], [3, 4], [4, 2]])) == pytest.approx(0.0, abs=1e-12)


def test_alpha_shift_and_scale(rng):
    x = rng.integers(1, 8, size=(50, 4)).astype(float)
    a = cronbach_alpha(x)
    shifted = x.copy()
    shifted[:, 2] += 3
    assert cronbach_alpha(shifted) == pytest.approx(a, abs=1e-12)
    scaled = x.copy()
    scaled[:, 2] *= 3
    assert cronbach_alpha(scaled) != pytest.approx(a, abs=1e-6)


def test_alpha_errors():
    with pytest.raises(TooFewItems):
        cronbach_alpha(np.ones((5, 1)))
    with pytest.raises(ZeroVariance):
        cronbach_alpha(np.array([[1, 3], [2, 3], [3, 3]]))


def test_alpha_on_likert_matrix(spec):
    pop = standardized_model(np.full(16, 0.8), np.eye(8) * 0.5 + 0.5, [i // 2 for i in range(16)], item_ids=tuple(spec.item_ids))
    data = sample_responses(pop, 200, seed=1)
    assert cronbach_alpha(data, ["u1", "u2"]) == pytest.approx(cronbach_alpha(data.columns(["u1", "u2"])))


def test_omega_examples():
    assert omega(solution([0.8, 0.8], [0.36, 0.36])) == pytest.approx(2.56 / 3.28)
    assert f"{omega(solution([0.8, 0.8], [0.36, 0.36]), 'F0'):.4f}" == "0.7805"
    assert omega(solution([0.8, 0.8], [0.0, 0.0]), "F0") == 1.0
    assert f"{omega(solution([0.92, 0.92], [0.154, 0.154]), 'F0'):.3f}" == "0.917"


def test_omega_variants_agree_on_standardized_input():
    sol = solution([0.8, 0.7, 0.6], [0.36, 0.51, 0.64])
    values = [omega(sol, "F0", v) for v in ("raykov", "bentler", "mcdonald")]
    assert np.allclose(values, values[0])


def test_omega_bentler_uses_standardized_metric():
    sol = solution([2.0, 1.0], [1.0, 1.0])
    assert omega(sol, "F0", "mcdonald") == pytest.approx(9 / 11)
    # standardized loadings 2/sqrt5 and 1/sqrt2
    lam = np.array([2 / np.sqrt(5), 1 / np.sqrt(2)])
    expected = lam.sum() ** 2 / (lam.sum() ** 2 + 1 / 5 + 1 / 2)
    assert omega(sol, "F0", "bentler") == pytest.approx(expected)


def test_omega_overall_uses_implied_total():
    sol = solution([0.8, 0.8, 0.7, 0.7], [0.36, 0.36, 0.51, 0.51], groups=[0, 0, 1, 1])
    total = float(np.sum(sol.implied()))
    assert omega(sol) == pytest.approx((total - 1.74) / total)
    assert omega(sol, "overall") == omega(sol)


def test_omega_errors():
    sol = solution([0.8, 0.8], [0.36, 0.36])
    with pytest.raises(UnknownFactor):
        omega(sol, "nope")
    with pytest.raises(UnfittedSolution):
        omega(None, "F0")
    with pytest.raises(ValueError):
        omega(sol, "F0", "guttman")


def test_alpha_conditions_published_loadings():
    lam = np.array(PUBLISHED_1F)
    sol = solution(lam, 1 - lam**2)
    cond = alpha_conditions(sol, fit_of(0.836, 0.811, 0.138, 0.068), DEFAULT_THRESHOLDS)
    assert f"{cond.average_loading:.3f}" == "0.737"
    assert cond.max_loading_deviation == pytest.approx(0.17, abs=1e-3)
    assert cond.average_above and cond.deviation_below
    assert not cond.unidimensional_fit
    assert not cond.all_hold


def test_alpha_conditions_all_hold():
    sol = solution(np.full(6, 0.9), np.full(6, 0.19))
    cond = alpha_conditions(sol, fit_of(1.0, 1.0, 0.0, 0.0), DEFAULT_THRESHOLDS)
    assert cond.all_hold
    assert cond.max_loading_deviation == pytest.approx(0.0, abs=1e-12)


def test_icc_examples():
    x = np.array([3.0, 5.0, 1.0, 6.5, 2.0])
    assert icc_test_retest(x, x) == 1.0
    # a constant shift is perfect consistency but not perfect agreement
    assert icc_test_retest([1, 2, 3], [2, 3, 4]) == pytest.approx(2 / 3)


def test_icc_near_zero_for_unrelated_scores():
    values = []
    for seed in range(200):
        r = np.random.default_rng(seed)
        values.append(icc_test_retest(r.normal(size=100), r.normal(size=100)))
    assert abs(np.mean(values)) < 0.02


def test_icc_errors():
    with pytest.raises(LengthMismatch):
        icc_test_retest([1, 2, 3], [1, 2])
    with pytest.raises(LengthMismatch):
        icc_test_retest([1, 2], [1, 2])
    with pytest.raises(DegenerateVariance):
        icc_test_retest([2, 2, 2], [2, 2, 2])


def test_tau_equivalent_alpha_matches_population_omega():
    model = model_from_groups([f"x{i}" for i in range(5)], ["g"], [0] * 5)
    pop = standardized_model(np.full(5, 0.7), np.eye(1), model.assignment)
    s = population_covariance(pop)
    w = omega(fit_ml(model, s, 1000), "g", "mcdonald")
    x = sample_continuous(pop, 50_000, seed=9)
    assert cronbach_alpha(x) == pytest.approx(w, abs=0.01)


def test_alpha_close_to_omega_when_conditions_hold():
    lam = np.array([0.75, 0.8, 0.85, 0.8, 0.75, 0.85])
    model = model_from_groups([f"x{i}" for i in range(6)], ["g"], [0] * 6)
    pop = standardized_model(lam, np.eye(1), model.assignment)
    data = sample_responses(pop, 2000, seed=4)
    s = np.cov(data.responses.astype(float), rowvar=False)
    sol = fit_ml(model, s, 2000)
    cond = alpha_conditions(sol, fit_indices(sol, model, s, 2000), DEFAULT_THRESHOLDS)
    assert cond.average_above and cond.deviation_below
    assert abs(cronbach_alpha(data.responses) - omega(sol, "g")) < 0.1


def test_reliability_table_layout(spec):
    pop = standardized_model(np.full(16, 0.8), np.eye(8) * 0.6 + 0.4, [i // 2 for i in range(16)], item_ids=tuple(spec.item_ids))
    data = sample_responses(pop, 300, seed=2)
    model = build_model(spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sol = fit_ml(model, np.cov(data.responses.astype(float), rowvar=False), 300)
    rows = reliability_table(data, spec, sol)
    assert [r.label for r in rows] == spec.factor_ids + ["overall"]
    for r in rows:
        assert r.alpha <= 1 and 0 <= r.omega_mcdonald <= 1
        assert r.omega_raykov == r.omega_mcdonald


def test_spec_without_factor_raises():
    spec = ScaleSpec(factors=(("a", ("x0", "x1")),))
    with pytest.raises(UnknownFactor):
        omega(solution([0.8, 0.8], [0.36, 0.36]), spec.factor_ids[0])
