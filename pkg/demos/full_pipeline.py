"""
End-to-end validation report
============================

Simulate a survey for the bundled scale, write it to CSV, and run every
stage through the same entry point the command line uses.
"""

import tempfile
from pathlib import Path

from scaleval.data import bundled_spec, to_csv
from scaleval.report import RunConfig, render, run_pipeline
from scaleval.synthetic import sample_responses, spec_population

spec = bundled_spec()
population, criteria = spec_population(spec)
data = sample_responses(population, 300, seed=42, criteria=criteria)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "responses.csv"
    path.write_text(to_csv(data))
    report = run_pipeline(RunConfig(responses=str(path), seed=42))

print(render(report))
