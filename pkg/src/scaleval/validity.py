"""
Convergent, discriminant and criterion validity.

Convergent and discriminant statistics are computed from the standardized
hypothesized-model solution; HTMT and criterion statistics work on the
observed item data.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    MissingCriterion,
    NonPositiveMonotrait,
    RankDeficient,
    SampleTooSmall,
    UnknownFactor,
    ZeroVariance,
)
from .numerics import normal_quantile, student_t_quantile, student_t_sf


@dataclass(frozen=True)
class ConstructStats:
    factor_id: str
    cr: float
    ave: float

    @property
    def sqrt_ave(self):
        return float(np.sqrt(self.ave))


def cr_ave(solution, factor):
    """Composite reliability and average variance extracted for one factor."""
    sol = solution.standardized()
    if factor not in sol.model.factor_ids:
        raise UnknownFactor(factor)
    lam, theta = sol.factor_loadings(factor)
    s = float(np.sum(lam))
    cr = s**2 / (s**2 + float(np.sum(theta)))
    ave = float(np.sum(lam**2)) / lam.size
    return ConstructStats(factor, cr, ave)


@dataclass(frozen=True)
class DiscriminantCell:
    pair: tuple
    correlation: float
    henseler_violation: bool
    fornell_original_violation: bool
    htmt: float = None
    htmt_085_violation: bool = None
    htmt_09_violation: bool = None

    @property
    def sv(self):
        return self.correlation**2


def fornell_larcker(stats, phi, htmt_values=None, thresholds=None):
    """
    Flag factor pairs under both readings of the Fornell-Larcker criterion.

    Henseler reading: |corr| >= the smaller square-root AVE of the pair.
    Original reading: SV = corr^2 >= the smaller AVE (i.e. not both AVEs
    exceed the shared variance).  When an HTMT matrix in the same factor
    order is supplied, its strict/liberal threshold flags are attached too.
    """
    phi = np.asarray(phi, dtype=float)
    k = len(stats)
    if phi.shape != (k, k):
        raise DimensionMismatch(f"{k} constructs but phi is {phi.shape}")
    strict = thresholds.htmt_strict if thresholds else 0.85
    liberal = thresholds.htmt_liberal if thresholds else 0.9
    cells = []
    for i in range(k):
        for j in range(i):
            a, b = stats[i], stats[j]
            c = float(phi[i, j])
            h = None if htmt_values is None else float(htmt_values[i, j])
            cells.append(
                DiscriminantCell(
                    pair=(a.factor_id, b.factor_id),
                    correlation=c,
                    henseler_violation=abs(c) >= min(a.sqrt_ave, b.sqrt_ave),
                    fornell_original_violation=c * c >= min(a.ave, b.ave),
                    htmt=h,
                    htmt_085_violation=None if h is None else h >= strict,
                    htmt_09_violation=None if h is None else h >= liberal,
                )
            )
    return cells


def htmt_matrix(r, groups):
    """
    Heterotrait-monotrait ratios for item groups (lists of indices into `r`).

    Cross-group correlations enter as absolute values; within-group means
    use the signed correlations and must be positive.  Returns a symmetric
    matrix with unit diagonal.
    """
    r = np.asarray(r, dtype=float)
    mono = []
    for g, idx in enumerate(groups):
        if len(idx) < 2:
            raise NonPositiveMonotrait(f"group {g} has fewer than 2 items")
        block = r[np.ix_(idx, idx)]
        mean = float(block[np.triu_indices(len(idx), 1)].mean())
        if mean <= 0:
            raise NonPositiveMonotrait(f"group {g} has mean within-group correlation {mean:.3f}")
        mono.append(mean)
    k = len(groups)
    out = np.eye(k)
    for i in range(k):
        for j in range(i):
            hetero = float(np.abs(r[np.ix_(groups[i], groups[j])]).mean())
            out[i, j] = out[j, i] = hetero / np.sqrt(mono[i] * mono[j])
    return out


def htmt(r, spec):
    """HTMT matrix for the spec's factors; `r` is ordered like ``spec.item_ids``."""
    r = np.asarray(r, dtype=float)
    if r.shape[0] != len(spec.item_ids):
        raise DimensionMismatch(f"{r.shape[0]} correlations for {len(spec.item_ids)} items")
    return htmt_matrix(r, [spec.item_indices(f) for f in spec.factor_ids])


def _criterion_values(data, spec, criterion):
    if criterion in [c.name for c in spec.criteria]:
        crit = spec.criterion(criterion)
        missing = [c for c in crit.columns if c not in data.criteria]
        if missing:
            raise MissingCriterion(f"criterion {criterion!r} needs columns {missing}")
        return data.criterion_score(crit)
    if criterion in data.criteria:
        return np.asarray(data.criteria[criterion], dtype=float)
    raise MissingCriterion(criterion)


def domain_scores(data, spec):
    """Unweighted item mean per factor, shape (n, k)."""
    return np.column_stack([data.columns(spec.items_of(f)).mean(axis=1) for f in spec.factor_ids])


def fisher_ci(r, n, level=0.95):
    """Confidence interval for a Pearson correlation via Fisher's z."""
    if abs(r) >= 1.0:
        return float(r), float(r)
    z = np.arctanh(r)
    half = normal_quantile(0.5 + level / 2) / np.sqrt(n - 3)
    return float(np.tanh(z - half)), float(np.tanh(z + half))


def correlation_test(x, y):
    """Pearson r with its two-sided t-test p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = float(xc @ xc), float(yc @ yc)
    if sxx == 0.0:
        raise ZeroVariance("score")
    if syy == 0.0:
        raise ZeroVariance("criterion")
    r = float(np.clip((xc @ yc) / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(r) >= 1.0:
        return r, 0.0
    t = r * np.sqrt((n - 2) / (1.0 - r * r))
    return r, 2.0 * student_t_sf(abs(t), n - 2)


@dataclass(frozen=True)
class CorrelationRow:
    factor_id: str
    r: float
    p_value: float
    ci_lower: float
    ci_upper: float
    n: int


def concurrent_correlations(data, spec, criterion, level=0.95):
    """Correlate each factor's mean score with a criterion column."""
    y = _criterion_values(data, spec, criterion)
    n = data.n_respondents
    if n < 4:
        raise SampleTooSmall("need at least 4 respondents for a Fisher interval")
    rows = []
    for fid, score in zip(spec.factor_ids, domain_scores(data, spec).T):
        r, p = correlation_test(score, y)
        lo, hi = fisher_ci(r, n, level)
        rows.append(CorrelationRow(fid, r, p, lo, hi, n))
    return rows


@dataclass(frozen=True)
class Coefficient:
    name: str
    coefficient: float
    std_error: float
    p_value: float
    ci_lower: float
    ci_upper: float
    r2: float = None  # only for simple regressions


@dataclass(frozen=True)
class RegressionResult:
    intercept: float
    coefficients: tuple
    r2: float
    n: int
    df_resid: int
    simple: tuple = ()

    def coefficient(self, name):
        for c in self.coefficients:
            if c.name == name:
                return c
        raise KeyError(name)


def ols(x, y, names, level=0.95):
    """
    Least squares with intercept.

    Returns ``(intercept, coefficients, r2, df_resid, residuals)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = x.shape
    if n <= m + 1:
        raise SampleTooSmall(f"{n} observations for {m} predictors plus intercept")
    design = np.column_stack([np.ones(n), x])
    if np.linalg.matrix_rank(design) < m + 1:
        raise RankDeficient("design matrix is rank deficient")
    q, rr = np.linalg.qr(design)
    beta = np.linalg.solve(rr, q.T @ y)
    resid = y - design @ beta
    rss = float(resid @ resid)
    yc = y - y.mean()
    tss = float(yc @ yc)
    if tss == 0.0:
        raise ZeroVariance("criterion")
    df = n - m - 1
    sigma2 = rss / df
    rinv = np.linalg.solve(rr, np.eye(m + 1))
    se = np.sqrt(sigma2 * np.sum(rinv**2, axis=1))
    crit = student_t_quantile(0.5 + level / 2, df)
    coefs = []
    for j, name in enumerate(names, start=1):
        b, s = float(beta[j]), float(se[j])
        if s > 0:
            p = 2.0 * student_t_sf(abs(b / s), df)
        else:
            p = 0.0 if b != 0 else 1.0
        coefs.append(Coefficient(name, b, s, p, b - crit * s, b + crit * s))
    return float(beta[0]), tuple(coefs), 1.0 - rss / tss, df, resid


def predictive_regression(data, spec, criterion, level=0.95, simple=True):
    """
    Regress a criterion on every scale item at once.

    With `simple` set, one-predictor regressions per item are attached as a
    supplement (each with its own R^2).
    """
    y = _criterion_values(data, spec, criterion)
    x = data.columns(spec.item_ids).astype(float)
    intercept, coefs, r2, df, _ = ols(x, y, spec.item_ids, level)
    extra = ()
    if simple:
        rows = []
        for j, item in enumerate(spec.item_ids):
            _, (c,), r2_j, _, _ = ols(x[:, [j]], y, [item], level)
            rows.append(Coefficient(c.name, c.coefficient, c.std_error, c.p_value, c.ci_lower, c.ci_upper, r2_j))
        extra = tuple(rows)
    return RegressionResult(intercept, coefs, r2, data.n_respondents, df, extra)


@dataclass(frozen=True)
class CriterionDiscriminant:
    """Discriminant statistics of a multi-item criterion against each factor."""

    criterion: str
    sv: dict  # factor -> squared correlation of observed scores
    htmt: dict
    sv_violation: dict  # factor -> SV >= factor AVE


def criterion_discriminant(data, spec, criterion, stats):
    """
    Compare a composite criterion (e.g. trust propensity) with every factor.

    Shared variance is the squared correlation between the factor's mean
    score and the criterion score; HTMT uses the criterion's item columns.
    """
    crit = spec.criterion(criterion)
    if not crit.is_composite:
        raise MissingCriterion(f"criterion {criterion!r} has a single column; HTMT needs items")
    y = _criterion_values(data, spec, criterion)
    extra = np.column_stack([data.criteria[c] for c in crit.columns])
    x = np.column_stack([data.responses.astype(float), extra])
    for j, v in enumerate(x.var(axis=0)):
        if v == 0:
            raise ZeroVariance((list(spec.item_ids) + list(crit.columns))[j])
    r = np.corrcoef(x, rowvar=False)
    p = len(spec.item_ids)
    groups = [spec.item_indices(f) for f in spec.factor_ids] + [list(range(p, p + len(crit.columns)))]
    h = htmt_matrix(r, groups)
    scores = domain_scores(data, spec)
    ave = {s.factor_id: s.ave for s in stats}
    sv, hv, viol = {}, {}, {}
    for j, fid in enumerate(spec.factor_ids):
        rr, _ = correlation_test(scores[:, j], y)
        sv[fid] = rr * rr
        hv[fid] = float(h[-1, j])
        viol[fid] = bool(sv[fid] >= ave[fid]) if fid in ave else None
    return CriterionDiscriminant(criterion, sv, hv, viol)
