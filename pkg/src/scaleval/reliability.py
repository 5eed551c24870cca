"""
Internal consistency and test-retest reliability.

Omega coefficients are read off a fitted CFA solution.  Three variants are
reported; they share the composite-reliability formula and differ only in
which solution supplies the loadings:

``mcdonald``
    the hypothesized-model solution as fitted (raw metric);
``raykov``
    the solution with uniqueness covariances fixed at zero, which for the
    simple-structure models fitted here is the same solution;
``bentler``
    the standardized solution (unit implied item variances).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, LengthMismatch, TooFewItems, UnfittedSolution, UnknownFactor, ZeroVariance

OMEGA_VARIANTS = ("raykov", "bentler", "mcdonald")


def cronbach_alpha(data, items=None):
    """
    Cronbach's alpha for a subset of item columns.

    `data` is a :class:`~scaleval.data.LikertMatrix` (with `items` a list of
    item ids, default all) or a plain ``(n, k)`` array.
    """
    if hasattr(data, "responses"):
        ids = list(items) if items is not None else list(data.item_ids)
        x = data.columns(ids).astype(float)
    else:
        x = np.asarray(data, dtype=float)
        ids = [f"v{j + 1}" for j in range(x.shape[1])]
    k = x.shape[1]
    if k < 2:
        raise TooFewItems("alpha needs at least 2 items")
    item_var = x.var(axis=0, ddof=1)
    for j, v in enumerate(item_var):
        if not v > 0:
            raise ZeroVariance(ids[j])
    total_var = x.sum(axis=1).var(ddof=1)
    return float(k / (k - 1) * (1.0 - item_var.sum() / total_var))


def composite_reliability(lam, theta, phi_ff=1.0):
    lam_sum = float(np.sum(lam))
    true = lam_sum**2 * phi_ff
    return true / (true + float(np.sum(theta)))


def _solution_for(solution, variant):
    if variant not in OMEGA_VARIANTS:
        raise ValueError(f"unknown omega variant {variant!r}")
    return solution.standardized() if variant == "bentler" else solution


def omega(solution, factor=None, variant="mcdonald"):
    """
    Model-based reliability of one factor's unit-weighted sum, or of the
    whole instrument when `factor` is ``None`` / ``"overall"``.
    """
    if solution is None or solution.lam is None:
        raise UnfittedSolution("omega needs a fitted solution")
    sol = _solution_for(solution, variant)
    if factor is None or factor == "overall":
        total = float(np.sum(sol.implied()))
        return (total - float(np.sum(sol.theta))) / total
    if factor not in sol.model.factor_ids:
        raise UnknownFactor(factor)
    lam, theta = sol.factor_loadings(factor)
    a = sol.model.factor_index(factor)
    return composite_reliability(lam, theta, sol.phi[a, a])


@dataclass(frozen=True)
class AlphaConditions:
    unidimensional_fit: bool
    average_loading: float
    max_loading_deviation: float
    loading_deviations: tuple
    average_above: bool
    deviation_below: bool

    @property
    def all_hold(self):
        return self.unidimensional_fit and self.average_above and self.deviation_below


def alpha_conditions(solution_1f, fit, thresholds):
    """
    Check when alpha may stand in for omega: a unidimensional model fits,
    the mean standardized loading exceeds 0.7, and no loading is 0.2 or
    more away from that mean.
    """
    lam = solution_1f.standardized().lam
    mean = float(np.mean(lam))
    dev = mean - lam
    max_dev = float(np.max(np.abs(dev)))
    return AlphaConditions(
        unidimensional_fit=bool(fit.passes(thresholds)),
        average_loading=mean,
        max_loading_deviation=max_dev,
        loading_deviations=tuple(float(d) for d in dev),
        average_above=mean > thresholds.avg_loading_min,
        deviation_below=max_dev < thresholds.loading_dev_max,
    )


def icc_test_retest(test, retest):
    """
    ICC(2,1): two-way random effects, absolute agreement, single measures.

    Rows are subjects, the two occasions are the columns of the ANOVA.
    """
    test = np.asarray(test, dtype=float)
    retest = np.asarray(retest, dtype=float)
    if test.shape != retest.shape or test.ndim != 1:
        raise LengthMismatch(f"{test.shape} vs {retest.shape}")
    n = test.size
    if n < 3:
        raise LengthMismatch("need at least 3 paired scores")
    # two occasions: sums of squares written through subject means and differences
    k = 2
    means = 0.5 * (test + retest)
    diff = test - retest
    ss_rows = k * np.sum((means - means.mean()) ** 2)
    ss_cols = 0.5 * n * diff.mean() ** 2
    ss_err = 0.5 * np.sum((diff - diff.mean()) ** 2)
    ms_r = ss_rows / (n - 1)
    ms_c = ss_cols / (k - 1)
    ms_e = ss_err / ((n - 1) * (k - 1))
    if ms_r == 0.0:
        raise DegenerateVariance("no between-subject variance")
    return float((ms_r - ms_e) / (ms_r + (k - 1) * ms_e + k * (ms_c - ms_e) / n))


@dataclass(frozen=True)
class ReliabilityRow:
    label: str
    alpha: float
    omega_raykov: float
    omega_bentler: float
    omega_mcdonald: float


def reliability_table(data, spec, solution):
    """One row per factor plus an overall row, in spec order."""
    rows = []
    for fid in spec.factor_ids:
        rows.append(
            ReliabilityRow(
                fid,
                cronbach_alpha(data, spec.items_of(fid)),
                *(omega(solution, fid, v) for v in OMEGA_VARIANTS),
            )
        )
    rows.append(
        ReliabilityRow(
            "overall",
            cronbach_alpha(data, spec.item_ids),
            *(omega(solution, None, v) for v in OMEGA_VARIANTS),
        )
    )
    return rows
