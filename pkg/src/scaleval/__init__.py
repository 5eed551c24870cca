"""Psychometric scale validation: content validity, sampling adequacy, CFA,
reliability and validity statistics for Likert instruments."""

__version__ = "0.1.0"

from .adequacy import bartlett, kmo, kmo_band
from .cfa import build_model, fit_indices, fit_ml
from .content import chance_agreement, classify_item, evaluate_content, item_cvi, kappa
from .data import (
    LikertMatrix,
    ScaleSpec,
    bundled_spec,
    correlation_matrix,
    covariance_matrix,
    descriptives,
    parse_responses,
    parse_spec,
)
from .reliability import alpha_conditions, cronbach_alpha, icc_test_retest, omega
from .thresholds import DEFAULT_THRESHOLDS, Thresholds
from .validity import concurrent_correlations, cr_ave, fornell_larcker, htmt, predictive_regression
