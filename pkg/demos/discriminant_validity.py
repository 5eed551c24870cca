"""
Fornell-Larcker and HTMT
========================

Two constructs measured by three items each.  When the constructs are in
truth the same, both Fornell-Larcker readings flag the pair and HTMT is close
to one; when they are unrelated, nothing is flagged.
"""

import numpy as np

from scaleval.cfa import fit_ml, model_from_groups
from scaleval.synthetic import sample_continuous, standardized_model
from scaleval.validity import cr_ave, fornell_larcker, htmt_matrix

model = model_from_groups([f"x{i}" for i in range(6)], ["A", "B"], [0, 0, 0, 1, 1, 1])

for rho in (1.0, 0.5, 0.0):
    phi = np.array([[1.0, rho], [rho, 1.0]])
    x = sample_continuous(standardized_model(np.full(6, 0.8), phi, model.assignment), 5000, seed=11)
    sol = fit_ml(model, np.cov(x, rowvar=False), 5000)
    h = htmt_matrix(np.corrcoef(x, rowvar=False), [[0, 1, 2], [3, 4, 5]])
    stats = [cr_ave(sol, f) for f in ("A", "B")]
    cell = fornell_larcker(stats, sol.standardized().phi, h)[0]
    print(f"rho={rho:.1f}  r={cell.correlation:.3f}  AVE={stats[0].ave:.3f}  HTMT={cell.htmt:.3f}  "
          f"sqrt-AVE violation={cell.henseler_violation}  AVE-vs-SV violation={cell.fornell_original_violation}")
