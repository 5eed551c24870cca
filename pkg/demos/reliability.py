"""
Alpha, omega and test-retest stability
======================================

Cronbach's alpha equals the model-based omega when every item loads equally.
With unequal loadings alpha falls below omega.
"""

import numpy as np

from scaleval.cfa import fit_ml, model_from_groups
from scaleval.reliability import cronbach_alpha, icc_test_retest, omega
from scaleval.synthetic import sample_continuous, standardized_model

model = model_from_groups([f"x{i}" for i in range(6)], ["g"], [0] * 6)

for name, lam in (("equal", np.full(6, 0.7)), ("unequal", np.array([0.1, 0.2, 0.3, 0.7, 0.8, 0.9]))):
    x = sample_continuous(standardized_model(lam, np.eye(1), model.assignment), 5000, seed=3)
    sol = fit_ml(model, np.cov(x, rowvar=False), 5000)
    print(f"{name:<8} alpha={cronbach_alpha(x):.3f}  omega={omega(sol, 'g'):.3f}")

###############################################################################
# ICC(2,1) between two administrations: identical scores give exactly one,
# a constant shift lowers agreement even though ranks are unchanged.

first = np.array([3.0, 5.0, 1.0, 6.5, 2.0])
print(icc_test_retest(first, first), round(icc_test_retest(first, first + 1), 3))
