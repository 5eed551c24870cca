"""
Command-line entry point.

    scaleval pipeline --responses survey.csv --expert-ratings experts.csv
    scaleval cfa --responses survey.csv --format json
    scaleval simulate --n 300 --seed 42 --output synthetic.csv

Exit status is 0 when a report was produced and 2 on configuration or
input errors.
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from .data import bundled_spec, load_spec, to_csv
from .errors import ScaleValidationError
from .report import STAGES, RunConfig, not_run, render, run_pipeline
from .synthetic import sample_responses, spec_population
from .thresholds import DEFAULT_THRESHOLDS, load_thresholds

STAGE_COMMANDS = {
    "content": "content",
    "adequacy": "adequacy",
    "cfa": "dimensionality",
    "reliability": "reliability",
    "validity": "validity",
}


def _common(p):
    p.add_argument("--spec", help="scale definition file (default: bundled trust_ai_16)")
    p.add_argument("--responses", help="response CSV, one respondent per row")
    p.add_argument("--expert-ratings", help="expert ratings CSV: expert_id,item_id,relevance,clarity")
    p.add_argument("--criterion", help="criterion name for concurrent/predictive validity")
    p.add_argument("--retest", help="retest response CSV for ICC test-retest reliability")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thresholds", help="INI file with a [thresholds] section of overrides")
    p.add_argument("--cfa-input", choices=("covariance", "correlation"), default="covariance")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="scaleval", description="Psychometric scale validation")
    parser.add_argument("--version", action="version", version=f"scaleval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(STAGE_COMMANDS) + ["pipeline"]:
        _common(sub.add_parser(name, help=f"run the {name} stage" if name != "pipeline" else "run every stage"))
    sim = sub.add_parser("simulate", help="write a synthetic response CSV from a known factor model")
    sim.add_argument("--spec")
    sim.add_argument("--n", type=int, default=300)
    sim.add_argument("--seed", type=int, default=42)
    sim.add_argument("--loading", type=float, default=0.8)
    sim.add_argument("--factor-corr", type=float, default=0.5)
    sim.add_argument("--output", "-o")
    return parser


def _emit(text, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _simulate(args):
    spec = load_spec(args.spec) if args.spec else bundled_spec()
    model, criteria = spec_population(spec, args.loading, args.factor_corr)
    data = sample_responses(model, args.n, args.seed, criteria)
    _emit(to_csv(data), args.output)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            _simulate(args)
            return 0
        config = RunConfig(
            spec_path=args.spec,
            responses=args.responses,
            expert_ratings=args.expert_ratings,
            criterion=args.criterion,
            retest=args.retest,
            seed=args.seed,
            thresholds=load_thresholds(args.thresholds) if args.thresholds else DEFAULT_THRESHOLDS,
            cfa_input=args.cfa_input,
        )
        report = run_pipeline(config)
    except (ScaleValidationError, OSError) as exc:
        print(f"scaleval: error: {exc}", file=sys.stderr)
        return 2
    if args.command != "pipeline":
        keep = STAGE_COMMANDS[args.command]
        for s in STAGES:
            if s != keep:
                report.stages[s] = not_run("not requested")
    _emit(render(report, args.format), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
