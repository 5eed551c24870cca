"""
Maximum-likelihood confirmatory factor analysis for simple-structure models.

Each item loads on exactly one factor.  Factor variances are fixed at 1,
factor correlations and uniquenesses are free.  The parameter vector is
laid out as ``[loadings (p), uniquenesses (p), factor correlations (lower
triangle, row-major)]``.
"""

from dataclasses import dataclass, field, replace
import warnings

import numpy as np

from .errors import NotPositiveDefinite, SampleTooSmall, UnderidentifiedModel
from .numerics import as_symmetric, chi_square_sf, cholesky_log_det, minimize

HEYWOOD_FLOOR = 1e-6
START_LOADING = 0.7
START_UNIQUENESS = 0.51
START_CORRELATION = 0.3


@dataclass(frozen=True)
class CfaModel:
    item_ids: tuple
    factor_ids: tuple
    assignment: tuple  # factor index for each item

    @property
    def p(self):
        return len(self.item_ids)

    @property
    def k(self):
        return len(self.factor_ids)

    @property
    def n_params(self):
        return 2 * self.p + self.k * (self.k - 1) // 2

    @property
    def df(self):
        return self.p * (self.p + 1) // 2 - self.n_params

    def items_of(self, factor_index):
        return [i for i, a in enumerate(self.assignment) if a == factor_index]

    def factor_index(self, factor_id):
        return self.factor_ids.index(factor_id)

    def loading_matrix(self, lam):
        L = np.zeros((self.p, self.k))
        L[np.arange(self.p), self.assignment] = lam
        return L

    def unpack(self, x):
        p, k = self.p, self.k
        lam = x[:p]
        theta = x[p : 2 * p]
        phi = np.eye(k)
        if k > 1:
            rows, cols = np.tril_indices(k, -1)
            phi[rows, cols] = x[2 * p :]
            phi[cols, rows] = x[2 * p :]
        return lam, theta, phi

    def pack(self, lam, theta, phi):
        rows, cols = np.tril_indices(self.k, -1)
        return np.concatenate([lam, theta, np.asarray(phi)[rows, cols]])

    def implied(self, lam, theta, phi):
        L = self.loading_matrix(lam)
        return L @ phi @ L.T + np.diag(theta)


def build_model(spec, structure="hypothesized"):
    """
    CFA model for a :class:`~scaleval.data.ScaleSpec`.

    ``structure`` is ``"hypothesized"`` (one factor per spec factor) or
    ``"single_factor"`` (every item on one general factor).
    """
    items = tuple(spec.item_ids)
    if structure == "hypothesized":
        fids = tuple(spec.factor_ids)
        assign = tuple(fids.index(f) for f, its in spec.factors for _ in its)
    elif structure == "single_factor":
        fids = ("general",)
        assign = (0,) * len(items)
    else:
        raise ValueError(f"unknown structure {structure!r}")
    return model_from_groups(items, fids, assign)


def model_from_groups(item_ids, factor_ids, assignment):
    model = CfaModel(tuple(item_ids), tuple(factor_ids), tuple(int(a) for a in assignment))
    if model.df < 0:
        raise UnderidentifiedModel(
            f"{model.p * (model.p + 1) // 2} moments for {model.n_params} parameters"
        )
    return model


def discrepancy(model, x, s, log_det_s):
    """F_ML at parameter vector `x`; ``inf`` where the implied matrix is not PD."""
    lam, theta, phi = model.unpack(x)
    sigma = model.implied(lam, theta, phi)
    try:
        factor, ld = cholesky_log_det(sigma)
    except NotPositiveDefinite:
        return np.inf
    sinv_s = np.linalg.solve(factor.T, np.linalg.solve(factor, s))
    return ld + float(np.trace(sinv_s)) - log_det_s - model.p


def gradient(model, x, s):
    """Analytic gradient of F_ML with respect to the packed parameters."""
    lam, theta, phi = model.unpack(x)
    L = model.loading_matrix(lam)
    sigma = L @ phi @ L.T + np.diag(theta)
    inv = np.linalg.inv(sigma)
    g_sigma = inv - inv @ s @ inv
    g_sigma = 0.5 * (g_sigma + g_sigma.T)
    g_L = 2.0 * g_sigma @ L @ phi
    g_lam = g_L[np.arange(model.p), model.assignment]
    g_theta = np.diag(g_sigma).copy()
    parts = [g_lam, g_theta]
    if model.k > 1:
        rows, cols = np.tril_indices(model.k, -1)
        parts.append(2.0 * (L.T @ g_sigma @ L)[rows, cols])
    return np.concatenate(parts)


@dataclass(frozen=True)
class CfaSolution:
    model: CfaModel
    lam: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    discrepancy: float
    n: int
    converged: bool = True
    iterations: int = 0
    gradient_norm: float = 0.0
    warnings: tuple = ()
    input_kind: str = "covariance"
    standardized_form: bool = field(default=False)

    def implied(self):
        return self.model.implied(self.lam, self.theta, self.phi)

    def standardized(self):
        """Loadings and uniquenesses rescaled to unit implied item variances."""
        if self.standardized_form:
            return self
        sd = np.sqrt(np.diag(self.implied()))
        return replace(self, lam=self.lam / sd, theta=self.theta / sd**2, standardized_form=True)

    def factor_loadings(self, factor_id):
        idx = self.model.items_of(self.model.factor_index(factor_id))
        return self.lam[idx], self.theta[idx]

    def to_dict(self):
        m = self.model
        return {
            "items": list(m.item_ids),
            "factors": list(m.factor_ids),
            "assignment": [m.factor_ids[a] for a in m.assignment],
            "loadings": self.lam.tolist(),
            "uniquenesses": self.theta.tolist(),
            "factor_correlations": self.phi.tolist(),
            "discrepancy": self.discrepancy,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
            "warnings": list(self.warnings),
            "input": self.input_kind,
        }


def _start(model, s):
    sd = np.sqrt(np.diag(s))
    phi = np.full((model.k, model.k), START_CORRELATION)
    np.fill_diagonal(phi, 1.0)
    return model.pack(START_LOADING * sd, START_UNIQUENESS * sd**2, phi)


def fit_ml(model, s, n, tol=1e-7, max_iter=5000, input_kind="covariance"):
    """
    Fit `model` to covariance (or correlation) matrix `s` by minimizing F_ML.

    Non-convergence does not raise: the best point is returned with
    ``converged=False`` and a warning string.  Uniquenesses below 1e-6 are
    floored there (Heywood cases) and also noted in ``warnings``.
    """
    s = as_symmetric(s)
    if s.shape[0] != model.p:
        raise ValueError(f"matrix order {s.shape[0]} does not match {model.p} items")
    if n <= model.p:
        raise SampleTooSmall(f"need more respondents ({n}) than items ({model.p})")
    _, ld_s = cholesky_log_det(s)

    res = minimize(
        lambda x: discrepancy(model, x, s, ld_s),
        _start(model, s),
        grad=lambda x: gradient(model, x, s),
        tol=tol,
        max_iter=max_iter,
    )
    lam, theta, phi = model.unpack(res.point.copy())
    notes = []
    if not res.converged:
        notes.append(f"did not converge: {res.message} (gradient norm {res.gradient_norm:.2e})")

    # sign convention: first loading of each factor non-negative
    for a in range(model.k):
        idx = model.items_of(a)
        if idx and lam[idx[0]] < 0:
            lam[idx] = -lam[idx]
            phi[a, :] = -phi[a, :]
            phi[:, a] = -phi[:, a]
            phi[a, a] = 1.0

    heywood = theta < HEYWOOD_FLOOR
    f_min = res.objective
    if np.any(heywood):
        bad = [model.item_ids[i] for i in np.flatnonzero(heywood)]
        notes.append(f"Heywood case: uniqueness floored at {HEYWOOD_FLOOR:g} for {bad}")
        theta = np.where(heywood, HEYWOOD_FLOOR, theta)
        f_min = discrepancy(model, model.pack(lam, theta, phi), s, ld_s)
    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)

    return CfaSolution(
        model=model,
        lam=lam,
        phi=phi,
        theta=theta,
        discrepancy=max(float(f_min), 0.0),
        n=int(n),
        converged=res.converged,
        iterations=res.iterations,
        gradient_norm=res.gradient_norm,
        warnings=tuple(notes),
        input_kind=input_kind,
    )


@dataclass(frozen=True)
class FitIndices:
    chi2: float
    df: int
    p_value: float
    chi2_baseline: float
    df_baseline: int
    cfi: float
    tli: float  # None when df == 0
    rmsea: float  # None when df == 0
    srmr: float = None

    def passes(self, thresholds):
        """True when every index meets its cut-off (undefined indices fail)."""
        checks = [
            self.cfi is not None and self.cfi > thresholds.cfi_min,
            self.tli is not None and self.tli > thresholds.tli_min,
            self.rmsea is not None and self.rmsea < thresholds.rmsea_max,
            self.srmr is not None and self.srmr < thresholds.srmr_max,
        ]
        return all(checks)

    def to_dict(self):
        return dict(self.__dict__)


def baseline_discrepancy(s):
    """F_ML of the independence model: variances free, covariances zero."""
    _, ld = cholesky_log_det(s)
    return float(np.sum(np.log(np.diag(s))) - ld)


def indices_from_chi2(chi2, df, chi2_baseline, df_baseline, n):
    """CFI, TLI and RMSEA from model and baseline chi-squares."""
    excess = max(chi2 - df, 0.0)
    denom = max(chi2_baseline - df_baseline, chi2 - df, 0.0)
    cfi = 1.0 - excess / denom if denom > 0 else 1.0
    if df > 0:
        ratio_b = chi2_baseline / df_baseline
        tli = (ratio_b - chi2 / df) / (ratio_b - 1.0) if ratio_b != 1.0 else None
        rmsea = float(np.sqrt(excess / (df * (n - 1))))
    else:
        tli = rmsea = None
    return cfi, tli, rmsea


def srmr(s, sigma):
    """Root mean square of standardized residuals over the lower triangle, diagonal included."""
    d = np.sqrt(np.diag(s))
    resid = (s - sigma) / np.outer(d, d)
    rows, cols = np.tril_indices(s.shape[0])
    return float(np.sqrt(np.mean(resid[rows, cols] ** 2)))


def fit_indices(solution, model, s, n):
    s = as_symmetric(s)
    chi2 = (n - 1) * solution.discrepancy
    df = model.df
    p = model.p
    chi2_b = (n - 1) * baseline_discrepancy(s)
    df_b = p * (p - 1) // 2
    cfi, tli, rmsea = indices_from_chi2(chi2, df, chi2_b, df_b, n)
    p_value = chi_square_sf(chi2, df) if df > 0 else None
    return FitIndices(chi2, df, p_value, chi2_b, df_b, cfi, tli, rmsea, srmr(s, solution.implied()))
