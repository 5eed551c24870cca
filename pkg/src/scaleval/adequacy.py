"""Kaiser-Meyer-Olkin sampling adequacy and Bartlett's test of sphericity."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateZeroCorrelation, SampleTooSmall
from .numerics import as_symmetric, chi_square_sf, cholesky_log_det, inverse_spd

# Kaiser's ladder, lower bounds of half-open bands; the top band is closed at 1.
KMO_BANDS = (
    (0.90, "marvelous"),
    (0.80, "meritorious"),
    (0.70, "middling"),
    (0.60, "mediocre"),
    (0.50, "miserable"),
    (0.0, "unacceptable"),
)


def kmo_band(value):
    for lower, label in KMO_BANDS:
        if value >= lower:
            return label
    return "unacceptable"


def kmo(r):
    """
    Overall KMO and per-item MSA from a correlation matrix.

    Partial correlations come from the inverse (anti-image) of `r`.
    """
    r = as_symmetric(r)
    inv = inverse_spd(r)
    d = 1.0 / np.sqrt(np.diag(inv))
    q = -inv * np.outer(d, d)
    off = ~np.eye(r.shape[0], dtype=bool)
    r2 = np.where(off, r**2, 0.0)
    q2 = np.where(off, q**2, 0.0)
    r_sum, q_sum = r2.sum(), q2.sum()
    if r_sum == 0.0:
        raise DegenerateZeroCorrelation("all off-diagonal correlations are zero")
    row_r, row_q = r2.sum(axis=1), q2.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_item = np.where(row_r > 0, row_r / (row_r + row_q), 0.0)
    return float(r_sum / (r_sum + q_sum)), per_item


def bartlett(r, n):
    """Chi-square, degrees of freedom and p-value of Bartlett's sphericity test."""
    r = as_symmetric(r)
    p = r.shape[0]
    if n <= p:
        raise SampleTooSmall(f"need more respondents ({n}) than items ({p})")
    _, ld = cholesky_log_det(r)
    chi2 = -(n - 1 - (2 * p + 5) / 6.0) * ld + 0.0
    df = p * (p - 1) // 2
    return chi2, df, chi_square_sf(chi2, df)


@dataclass(frozen=True)
class AdequacyReport:
    kmo_overall: float
    msa_per_item: dict
    kmo_band: str
    bartlett_chi2: float
    bartlett_df: int
    bartlett_p: float


def assess(r, n, item_ids):
    overall, per_item = kmo(r)
    chi2, df, p = bartlett(r, n)
    return AdequacyReport(
        kmo_overall=overall,
        msa_per_item={i: float(v) for i, v in zip(item_ids, per_item)},
        kmo_band=kmo_band(overall),
        bartlett_chi2=chi2,
        bartlett_df=df,
        bartlett_p=p,
    )
