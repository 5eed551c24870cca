"""
Ground-truth survey data from known factor models.

Draws use ``numpy.random.Generator(Philox(seed))``, a counter-based
generator, so a given ``(model, n, seed)`` always yields the same matrix.
Continuous draws are discretized to Likert categories by per-item cut
points: a value ``x`` becomes ``scale_min + #{thresholds < x}``.
"""

from dataclasses import dataclass

import numpy as np

from .data import LikertMatrix
from .errors import NotPositiveDefinite
from .numerics import as_symmetric, cholesky_log_det, normal_quantile


def default_thresholds(scale_min=1, scale_max=7):
    """Standard-normal quantiles splitting the line into equiprobable categories."""
    k = scale_max - scale_min + 1
    return np.array([normal_quantile(j / k) for j in range(1, k)])


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """
    Simple-structure factor model plus Likert cut points.

    ``assignment[i]`` is the factor of item ``i``.  ``thresholds`` is either a
    1-D array shared by all items (interpreted on the standardized item
    scale) or a ``(p, K-1)`` array in raw units.
    """

    lam: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    assignment: tuple
    item_ids: tuple = None
    scale_min: int = 1
    scale_max: int = 7
    thresholds: np.ndarray = None

    def __post_init__(self):
        p = len(self.lam)
        if self.item_ids is None:
            object.__setattr__(self, "item_ids", tuple(f"x{i + 1}" for i in range(p)))
        if self.thresholds is None:
            object.__setattr__(
                self, "thresholds", default_thresholds(self.scale_min, self.scale_max)
            )
        t = np.asarray(self.thresholds, dtype=float)
        if t.shape[-1] != self.scale_max - self.scale_min:
            raise ValueError("need scale_max - scale_min thresholds")
        if np.any(np.diff(t, axis=-1) < 0):
            raise ValueError("thresholds must be non-decreasing")

    @property
    def p(self):
        return len(self.lam)

    def loading_matrix(self):
        L = np.zeros((self.p, np.asarray(self.phi).shape[0]))
        L[np.arange(self.p), list(self.assignment)] = self.lam
        return L

    def raw_thresholds(self):
        t = np.asarray(self.thresholds, dtype=float)
        if t.ndim == 2:
            return t
        sd = np.sqrt(np.diag(population_covariance(self)))
        return sd[:, None] * t[None, :]


def standardized_model(lam, phi, assignment, **kwargs):
    """Model whose implied item variances are exactly 1."""
    lam = np.asarray(lam, dtype=float)
    return PopulationModel(lam, np.asarray(phi, dtype=float), 1.0 - lam**2, tuple(assignment), **kwargs)


def population_covariance(model):
    """
    Implied covariance ``L Phi L' + diag(theta)``.

    Singular but positive semidefinite matrices are returned as is (they
    are valid populations, just not samplable); a negative eigenvalue
    raises :class:`NotPositiveDefinite`.
    """
    L = model.loading_matrix()
    sigma = L @ np.asarray(model.phi, dtype=float) @ L.T + np.diag(model.theta)
    sigma = as_symmetric(0.5 * (sigma + sigma.T))
    if np.linalg.eigvalsh(sigma)[0] < -1e-12 * max(1.0, float(np.max(np.abs(sigma)))):
        raise NotPositiveDefinite("implied covariance has a negative eigenvalue")
    return sigma


def sample_continuous(model, n, seed):
    """Multivariate-normal draws (n x p) via the Cholesky factor of the implied covariance."""
    if n < 1:
        raise ValueError("n must be at least 1")
    factor, _ = cholesky_log_det(population_covariance(model))
    rng = np.random.Generator(np.random.Philox(seed))
    z = rng.standard_normal((n, model.p))
    return z @ factor.T


def discretize(x, thresholds, scale_min=1):
    """Map continuous columns to integer categories using per-item cut points."""
    t = np.asarray(thresholds, dtype=float)
    out = np.empty(x.shape, dtype=np.int64)
    for j in range(x.shape[1]):
        out[:, j] = scale_min + np.searchsorted(t[j], x[:, j], side="left")
    return out


def sample_responses(model, n, seed, criteria=None):
    """
    Likert responses drawn from `model`.

    `criteria` optionally maps a column name to an item index of `model`;
    that item is exported as a numeric criterion column instead of a scale
    item.
    """
    x = sample_continuous(model, n, seed)
    cats = discretize(x, model.raw_thresholds(), model.scale_min)
    criteria = criteria or {}
    crit_idx = set(criteria.values())
    keep = [j for j in range(model.p) if j not in crit_idx]
    return LikertMatrix(
        item_ids=tuple(model.item_ids[j] for j in keep),
        responses=cats[:, keep],
        scale_min=model.scale_min,
        scale_max=model.scale_max,
        criteria={name: cats[:, j].astype(float) for name, j in criteria.items()},
    )


def spec_population(spec, loadings=0.8, factor_corr=0.5, criterion_communality=0.6):
    """
    Population model for a scale spec, with criterion columns appended.

    Every scale item loads on its own factor.  A single-column criterion
    loads equally on all factors (communality `criterion_communality`); a
    composite criterion gets its own factor, correlated 0.3 with the rest,
    and one indicator per declared column.

    Returns ``(model, criteria)`` where `criteria` maps criterion column
    names to item indices, ready for :func:`sample_responses`.
    """
    k = len(spec.factor_ids)
    items = list(spec.item_ids)
    p = len(items)
    lam = np.broadcast_to(np.asarray(loadings, dtype=float), (p,)).copy()
    assign = [spec.factor_ids.index(f) for f, its in spec.factors for _ in its]

    phi = np.full((k, k), float(factor_corr))
    np.fill_diagonal(phi, 1.0)
    extra_lam, extra_assign, extra_ids = [], [], []
    single = []
    for crit in spec.criteria:
        if crit.is_composite:
            kk = phi.shape[0]
            grown = np.full((kk + 1, kk + 1), 0.3)
            grown[:kk, :kk] = phi
            grown[kk, kk] = 1.0
            phi = grown
            for col in crit.columns:
                extra_lam.append(0.75)
                extra_assign.append(kk)
                extra_ids.append(col)
        else:
            single.append(crit.columns[0])

    base = PopulationModel(
        lam=np.concatenate([lam, extra_lam]),
        phi=phi,
        theta=1.0 - np.concatenate([lam, extra_lam]) ** 2,
        assignment=tuple(assign + extra_assign),
        item_ids=tuple(items + extra_ids),
        scale_min=spec.scale_min,
        scale_max=spec.scale_max,
    )
    if not single:
        criteria = {c: p + j for j, c in enumerate(extra_ids)}
        return base, criteria

    # single-column criteria: an observed variable loading on a composite of
    # the scale factors, expressed as one extra factor equal to their sum
    kk = phi.shape[0]
    w = np.zeros(kk)
    w[:k] = 1.0
    var_sum = float(w @ phi @ w)
    grown = np.empty((kk + 1, kk + 1))
    grown[:kk, :kk] = phi
    cov_new = phi @ w / np.sqrt(var_sum)
    grown[kk, :kk] = cov_new
    grown[:kk, kk] = cov_new
    grown[kk, kk] = 1.0
    c = np.sqrt(criterion_communality)
    all_lam = list(base.lam) + [c] * len(single)
    all_assign = list(base.assignment) + [kk] * len(single)
    all_ids = list(base.item_ids) + single
    model = PopulationModel(
        lam=np.array(all_lam),
        phi=grown,
        theta=1.0 - np.array(all_lam) ** 2,
        assignment=tuple(all_assign),
        item_ids=tuple(all_ids),
        scale_min=spec.scale_min,
        scale_max=spec.scale_max,
    )
    names = extra_ids + single
    return model, {c: p + j for j, c in enumerate(names)}
