"""
Six-stage evaluation pipeline and report rendering.

A :class:`ValidationReport` holds one plain-dict subtree per stage, so the
JSON form is the report itself and rendering is a pure function of it.
Every stage subtree carries ``status`` (``ok``, ``failed``, ``not-run``)
and ``verdict`` (``pass``, ``fail``, ``not-run``).
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, is_dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .adequacy import assess
from .cfa import build_model, fit_indices, fit_ml
from .content import evaluate_content, parse_expert_ratings
from .data import correlation_matrix, covariance_matrix, parse_responses, parse_spec
from .errors import ConfigInvalid, InputUnreadable, ScaleValidationError
from .reliability import alpha_conditions, icc_test_retest, reliability_table
from .thresholds import DEFAULT_THRESHOLDS, Thresholds
from .validity import (
    concurrent_correlations,
    cr_ave,
    criterion_discriminant,
    fornell_larcker,
    htmt,
    predictive_regression,
)

STAGES = ("content", "adequacy", "dimensionality", "reliability", "validity")
STAGE_TITLES = {
    "content": "Stage 2. Item evaluation: content validity",
    "adequacy": "Stage 3. Survey administration: sampling adequacy",
    "dimensionality": "Stage 4. Test of dimensionality: confirmatory factor analysis",
    "reliability": "Stage 5. Test of reliability",
    "validity": "Stage 6. Test of validity",
}


def _plain(obj):
    """Recursively convert dataclasses / numpy values to JSON-ready builtins."""
    if is_dataclass(obj):
        obj = asdict(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def not_run(reason=""):
    return {"status": "not-run", "verdict": "not-run", "reason": reason}


def failed(exc):
    return {"status": "failed", "verdict": "fail", "error": f"{type(exc).__name__}: {exc}"}


@dataclass
class ValidationReport:
    stages: dict = field(default_factory=lambda: {s: not_run("no input") for s in STAGES})
    provenance: dict = field(default_factory=dict)

    @property
    def verdicts(self):
        return {s: self.stages.get(s, not_run())["verdict"] for s in STAGES}

    def to_dict(self):
        return {
            "provenance": _plain(self.provenance),
            "stages": {s: _plain(self.stages.get(s, not_run())) for s in STAGES},
            "verdicts": self.verdicts,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(stages=dict(d["stages"]), provenance=dict(d.get("provenance", {})))


@dataclass
class RunConfig:
    spec_path: str = None  # None -> bundled trust_ai_16
    responses: str = None
    expert_ratings: str = None
    criterion: str = None
    retest: str = None
    seed: int = 0
    thresholds: Thresholds = DEFAULT_THRESHOLDS
    cfa_input: str = "covariance"


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputUnreadable(f"cannot read {path}: {exc}") from exc


def _digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _spec_text(config):
    if config.spec_path is None:
        return resources.files("scaleval").joinpath("data", "trust_ai_16.spec").read_text("utf-8")
    return _read(config.spec_path)


# -- stages -----------------------------------------------------------------


def content_stage(ratings, thresholds=DEFAULT_THRESHOLDS):
    rows = evaluate_content(ratings)
    groups = {}
    for row in rows:
        groups.setdefault(row.factor_id or "all", []).append(row.decision == "keep")
    kept = {g: sum(v) for g, v in groups.items()}
    return {
        "status": "ok",
        "verdict": "pass" if all(n >= 2 for n in kept.values()) else "fail",
        "n_experts": ratings.n_experts,
        "rows": rows,
        "kept_per_group": kept,
        "removed": [r.item_id for r in rows if r.decision == "remove"],
        "dropped": [r.item_id for r in rows if r.decision == "drop"],
    }


def adequacy_stage(data, thresholds=DEFAULT_THRESHOLDS):
    rep = assess(correlation_matrix(data), data.n_respondents, list(data.item_ids))
    ok = rep.kmo_overall >= thresholds.kmo_min and rep.bartlett_p < thresholds.bartlett_alpha
    return {"status": "ok", "verdict": "pass" if ok else "fail", "n": data.n_respondents, "items": list(data.item_ids), **asdict(rep)}


def _cfa_input(data, kind):
    if kind == "correlation":
        return correlation_matrix(data)
    if kind == "covariance":
        return covariance_matrix(data)
    raise ConfigInvalid(f"cfa input must be covariance or correlation, got {kind!r}")


def fit_structure(spec, data, structure, kind="covariance"):
    model = build_model(spec, structure)
    s = _cfa_input(data, kind)
    sol = fit_ml(model, s, data.n_respondents, input_kind=kind)
    return model, sol, fit_indices(sol, model, s, data.n_respondents)


def _solution_summary(sol, fit):
    std = sol.standardized()
    m = sol.model
    return {
        "solution": sol.to_dict(),
        "standardized_loadings": std.lam.tolist(),
        "standardized_uniquenesses": std.theta.tolist(),
        "fit": fit.to_dict(),
        "input": sol.input_kind,
        "factors": list(m.factor_ids),
    }


def dimensionality_stage(spec, data, thresholds=DEFAULT_THRESHOLDS, kind="covariance"):
    _, sol, fit = fit_structure(spec, data, "hypothesized", kind)
    ok = fit.passes(thresholds) and sol.converged
    out = {"status": "ok", "verdict": "pass" if ok else "fail", "n": data.n_respondents}
    out.update(_solution_summary(sol, fit))
    return out, sol


def _test_scores(data):
    return data.responses.mean(axis=1)


def _paired_scores(test, retest):
    if test.respondent_ids is not None and retest.respondent_ids is not None:
        pos = {rid: i for i, rid in enumerate(retest.respondent_ids)}
        pairs = [(i, pos[rid]) for i, rid in enumerate(test.respondent_ids) if rid in pos]
        a = np.array([p[0] for p in pairs], dtype=int)
        b = np.array([p[1] for p in pairs], dtype=int)
        return _test_scores(test)[a], _test_scores(retest)[b]
    if test.n_respondents != retest.n_respondents:
        raise ConfigInvalid("retest rows do not match test rows and no respondent_id column")
    return _test_scores(test), _test_scores(retest)


def reliability_stage(spec, data, solution, thresholds=DEFAULT_THRESHOLDS, kind="covariance", retest=None):
    rows = reliability_table(data, spec, solution)
    coeffs = [v for r in rows for v in (r.alpha, r.omega_raykov, r.omega_bentler, r.omega_mcdonald)]
    out = {
        "status": "ok",
        "verdict": "pass" if min(coeffs) >= thresholds.reliability_min else "fail",
        "rows": rows,
    }
    try:
        _, sol1, fit1 = fit_structure(spec, data, "single_factor", kind)
        cond = alpha_conditions(sol1, fit1, thresholds)
        out["single_factor"] = _solution_summary(sol1, fit1)
        out["alpha_conditions"] = {**asdict(cond), "all_hold": cond.all_hold}
    except ScaleValidationError as exc:
        out["alpha_conditions"] = failed(exc)
    if retest is not None:
        try:
            a, b = _paired_scores(data, retest)
            out["icc"] = {"value": icc_test_retest(a, b), "n_pairs": int(a.size), "form": "ICC(2,1)"}
        except ScaleValidationError as exc:
            out["icc"] = failed(exc)
    return out


def _pick_criterion(spec, data, criterion):
    if criterion:
        return criterion
    for crit in spec.criteria:
        if not crit.is_composite and crit.columns[0] in data.criteria:
            return crit.name
    return None


def validity_stage(spec, data, solution, thresholds=DEFAULT_THRESHOLDS, criterion=None):
    stats = [cr_ave(solution, f) for f in spec.factor_ids]
    h = htmt(correlation_matrix(data), spec)
    cells = fornell_larcker(stats, solution.phi, h, thresholds)
    convergent = all(s.ave > thresholds.ave_min and s.cr > thresholds.cr_min for s in stats)
    discriminant = not any(c.fornell_original_violation or c.htmt_085_violation for c in cells)
    out = {
        "status": "ok",
        "constructs": [{**asdict(s), "sqrt_ave": s.sqrt_ave} for s in stats],
        "factor_correlations": solution.standardized().phi.tolist(),
        "htmt": h.tolist(),
        "discriminant": [{**asdict(c), "sv": c.sv} for c in cells],
        "sub_verdicts": {"convergent": convergent, "discriminant": discriminant},
    }
    crit_disc = []
    for crit in spec.criteria:
        if crit.is_composite and all(c in data.criteria for c in crit.columns):
            try:
                crit_disc.append(asdict(criterion_discriminant(data, spec, crit.name, stats)))
            except ScaleValidationError as exc:
                crit_disc.append({"criterion": crit.name, **failed(exc)})
    out["criterion_discriminant"] = crit_disc

    name = _pick_criterion(spec, data, criterion)
    if name is None:
        out["concurrent"] = not_run("no criterion column")
        out["predictive"] = not_run("no criterion column")
    else:
        try:
            rows = concurrent_correlations(data, spec, name)
            out["concurrent"] = {"criterion": name, "rows": rows}
            out["sub_verdicts"]["concurrent"] = all(r.p_value < thresholds.criterion_alpha and r.r > 0 for r in rows)
        except ScaleValidationError as exc:
            out["concurrent"] = failed(exc)
            out["sub_verdicts"]["concurrent"] = False
        try:
            out["predictive"] = {"criterion": name, **asdict(predictive_regression(data, spec, name))}
        except ScaleValidationError as exc:
            out["predictive"] = failed(exc)
    out["verdict"] = "pass" if all(out["sub_verdicts"].values()) else "fail"
    return out


# -- orchestration ----------------------------------------------------------


def run_pipeline(config):
    """
    Run every stage whose inputs are present, in order.

    A stage that raises is recorded as failed; stages depending on it
    (reliability and validity need the CFA solution) are marked not-run.
    """
    if config.responses is None and config.expert_ratings is None:
        raise ConfigInvalid("need responses and/or expert ratings")
    spec_text = _spec_text(config)
    spec = parse_spec(spec_text)
    th = config.thresholds
    if config.cfa_input not in ("covariance", "correlation"):
        raise ConfigInvalid(f"cfa input must be covariance or correlation, got {config.cfa_input!r}")
    report = ValidationReport()
    inputs = {"spec": _digest(spec_text)}

    if config.expert_ratings is not None:
        text = _read(config.expert_ratings)
        inputs["expert_ratings"] = _digest(text)
        try:
            report.stages["content"] = content_stage(parse_expert_ratings(text), th)
        except ScaleValidationError as exc:
            report.stages["content"] = failed(exc)
    else:
        report.stages["content"] = not_run("no expert ratings")

    if config.responses is not None:
        text = _read(config.responses)
        inputs["responses"] = _digest(text)
        data = parse_responses(text, spec)
        retest = None
        if config.retest is not None:
            rtext = _read(config.retest)
            inputs["retest"] = _digest(rtext)
            retest = parse_responses(rtext, spec)

        try:
            report.stages["adequacy"] = adequacy_stage(data, th)
        except ScaleValidationError as exc:
            report.stages["adequacy"] = failed(exc)

        solution = None
        try:
            report.stages["dimensionality"], solution = dimensionality_stage(spec, data, th, config.cfa_input)
        except ScaleValidationError as exc:
            report.stages["dimensionality"] = failed(exc)

        if solution is None:
            report.stages["reliability"] = not_run("dimensionality stage failed")
            report.stages["validity"] = not_run("dimensionality stage failed")
        else:
            for name, fn in (
                ("reliability", lambda: reliability_stage(spec, data, solution, th, config.cfa_input, retest)),
                ("validity", lambda: validity_stage(spec, data, solution, th, config.criterion)),
            ):
                try:
                    report.stages[name] = fn()
                except ScaleValidationError as exc:
                    report.stages[name] = failed(exc)
        report.stages["adequacy"]["n_dropped"] = data.n_dropped
    else:
        for s in ("adequacy", "dimensionality", "reliability", "validity"):
            report.stages[s] = not_run("no responses")

    report.provenance = {
        "tool_version": __version__,
        "seed": config.seed,
        "inputs": inputs,
        "scale": spec.name,
        "thresholds": th.to_dict(),
        "cfa_input": config.cfa_input,
    }
    return report


# -- rendering ----------------------------------------------------------------


def render(report, fmt="text"):
    """Render a report as ``"text"`` (published-table layouts) or stable ``"json"``."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    d = report.to_dict()
    out = ["SCALE VALIDATION REPORT", "=" * 23]
    prov = d["provenance"]
    if prov:
        out.append(f"scale: {prov.get('scale')}  tool: {prov.get('tool_version')}  seed: {prov.get('seed')}")
        for k in sorted(prov.get("inputs", {})):
            out.append(f"  {k} sha256 {prov['inputs'][k]}")
    out.append("")
    out.append("Verdicts")
    for s in STAGES:
        out.append(f"  {s:<16}{d['verdicts'][s]}")
    for s in STAGES:
        out.append("")
        out.extend(render_stage(s, d["stages"][s]))
    return "\n".join(out) + "\n"


def _f(v, nd=3):
    return "-" if v is None else f"{v:.{nd}f}"


def _status_lines(stage):
    if stage["status"] == "not-run":
        return [f"  not-run ({stage.get('reason', '')})"]
    if stage["status"] == "failed":
        return [f"  FAILED: {stage['error']}"]
    return None


def render_stage(name, stage):
    lines = [STAGE_TITLES[name], "-" * len(STAGE_TITLES[name])]
    status = _status_lines(stage)
    if status:
        return lines + status
    return lines + _RENDERERS[name](stage) + [f"  verdict: {stage['verdict']}"]


def render_content(stage):
    lines = [f"  experts: {stage['n_experts']}"]
    head = f"  {'Item':<10}{'EA':>4}{'CVI':>8}{'PC':>8}{'kappa':>8}  {'CVI interp.':<14}{'kappa interp.':<15}{'Clarity':<10}{'Decision'}"
    lines.append(head)
    group = object()
    for row in stage["rows"]:
        if row["factor_id"] != group and row["factor_id"] is not None:
            lines.append(f"  {row['factor_id']}")
        group = row["factor_id"]
        lines.append(
            f"  {row['item_id']:<10}{row['ea']:>4}{row['cvi']:>8.3f}{row['pc']:>8.3f}{row['kappa']:>8.3f}  "
            f"{row['cvi_label']:<14}{row['kappa_label']:<15}{row['clarity_label'] or '':<10}{row['decision']}"
        )
    lines.append(f"  removed: {', '.join(stage['removed']) or 'none'}")
    lines.append(f"  dropped (factor already has two Excellent items): {', '.join(stage['dropped']) or 'none'}")
    return lines


def render_adequacy(stage):
    lines = [
        f"  Kaiser-Meyer-Olkin measure of sampling adequacy   {stage['kmo_overall']:.4f} ({stage['kmo_band']})",
        f"  Bartlett's test of sphericity  Approx. Chi-Square {stage['bartlett_chi2']:.2f}",
        f"                                 df                 {stage['bartlett_df']}",
        f"                                 Sig.               {stage['bartlett_p']:.4f}",
        f"  respondents: {stage['n']}  dropped (listwise): {stage.get('n_dropped', 0)}",
        "  per-item MSA:",
    ]
    for item in stage["items"]:
        lines.append(f"    {item:<10}{stage['msa_per_item'][item]:.4f}")
    return lines


def _fit_lines(fit):
    return [
        f"  Chi-square                                       {_f(fit['chi2'])} (df {fit['df']}, p {_f(fit['p_value'], 4)})",
        f"  Comparative Fit Index (CFI)                      {_f(fit['cfi'])}",
        f"  Tucker-Lewis Index (TLI)                         {_f(fit['tli'])}",
        f"  Root Mean Square Error of Approximation (RMSEA)  {_f(fit['rmsea'])}",
        f"  Standardized Root Mean Square Residual (SRMR)    {_f(fit['srmr'])}",
        f"  baseline chi-square {_f(fit['chi2_baseline'])} (df {fit['df_baseline']})",
    ]


def _loading_lines(summary):
    sol = summary["solution"]
    lines = [f"  {'Item':<10}{'Factor':<26}{'Loading':>9}{'Std.':>8}{'Uniq.':>8}"]
    for i, item in enumerate(sol["items"]):
        lines.append(
            f"  {item:<10}{sol['assignment'][i]:<26}{sol['loadings'][i]:>9.3f}"
            f"{summary['standardized_loadings'][i]:>8.3f}{sol['uniquenesses'][i]:>8.3f}"
        )
    return lines


def render_dimensionality(stage):
    sol = stage["solution"]
    lines = [f"  input: {stage['input']} matrix, n = {stage['n']}, converged: {sol['converged']}"]
    lines += _fit_lines(stage["fit"])
    lines += _loading_lines(stage)
    k = len(sol["factors"])
    if k > 1:
        lines.append("  factor correlations:")
        for i in range(k):
            cells = " ".join(f"{sol['factor_correlations'][i][j]:6.3f}" for j in range(i + 1))
            lines.append(f"    {sol['factors'][i]:<26}{cells}")
    for w in sol["warnings"]:
        lines.append(f"  warning: {w}")
    return lines


def render_reliability(stage):
    lines = [f"  {'':<26}{'alpha':>9}{'Raykov':>9}{'Bentler':>9}{'McDonald':>9}"]
    for r in stage["rows"]:
        lines.append(
            f"  {r['label']:<26}{r['alpha']:>9.4f}{r['omega_raykov']:>9.4f}"
            f"{r['omega_bentler']:>9.4f}{r['omega_mcdonald']:>9.4f}"
        )
    cond = stage.get("alpha_conditions")
    if cond and cond.get("status") == "failed":
        lines.append(f"  alpha conditions: FAILED: {cond['error']}")
    elif cond:
        lines.append("  alpha-as-omega conditions (single-factor model):")
        lines += ["  " + ln for ln in _fit_lines(stage["single_factor"]["fit"])]
        lines.append(f"    (1) unidimensional fit        {cond['unidimensional_fit']}")
        lines.append(f"    (2) average loading {cond['average_loading']:.3f}    {cond['average_above']}")
        lines.append(f"    (3) max deviation {cond['max_loading_deviation']:.3f}      {cond['deviation_below']}")
        items = stage["single_factor"]["solution"]["items"]
        for item, lam, dev in zip(items, stage["single_factor"]["standardized_loadings"], cond["loading_deviations"]):
            lines.append(f"      {item:<10}{lam:.3f}  {dev:+.3f}")
    icc = stage.get("icc")
    if icc:
        if icc.get("status") == "failed":
            lines.append(f"  test-retest: FAILED: {icc['error']}")
        else:
            lines.append(f"  test-retest {icc['form']} = {icc['value']:.4f} ({icc['n_pairs']} pairs)")
    return lines


def _matrix_lines(names, values, diag, stars=None):
    lines = ["  " + " " * 26 + "".join(f"{n[:8]:>9}" for n in names)]
    for i, n in enumerate(names):
        cells = []
        for j in range(i + 1):
            v = diag[i] if i == j else values[i][j]
            mark = "*" if stars and i != j and stars.get((names[i], names[j])) else " "
            cells.append(f"{v:>8.3f}{mark}")
        lines.append(f"  {n:<26}" + "".join(cells))
    return lines


def render_validity(stage):
    cons = stage["constructs"]
    names = [c["factor_id"] for c in cons]
    lines = [f"  {'Construct':<26}{'CR':>8}{'AVE':>8}{'sqrt(AVE)':>11}"]
    for c in cons:
        lines.append(f"  {c['factor_id']:<26}{c['cr']:>8.3f}{c['ave']:>8.3f}{c['sqrt_ave']:>11.3f}")
    cells = stage["discriminant"]
    hen = {tuple(c["pair"]): c["henseler_violation"] for c in cells}
    orig = {tuple(c["pair"]): c["fornell_original_violation"] for c in cells}
    h85 = {tuple(c["pair"]): c["htmt_085_violation"] for c in cells}
    phi = stage["factor_correlations"]
    sv = [[v * v for v in row] for row in phi]
    lines.append("  Fornell-Larcker (sqrt AVE on diagonal, factor correlations below; * Henseler reading):")
    lines += _matrix_lines(names, phi, [c["sqrt_ave"] for c in cons], hen)
    lines.append("  Fornell-Larcker (AVE on diagonal, shared variance below; * original reading):")
    lines += _matrix_lines(names, sv, [c["ave"] for c in cons], orig)
    lines.append("  HTMT (* at or above the strict threshold):")
    lines += _matrix_lines(names, stage["htmt"], [1.0] * len(names), h85)
    for cd in stage["criterion_discriminant"]:
        if cd.get("status") == "failed":
            lines.append(f"  {cd['criterion']}: FAILED: {cd['error']}")
            continue
        lines.append(f"  {cd['criterion']} vs factors (SV / HTMT):")
        for f in names:
            lines.append(f"    {f:<26}{cd['sv'][f]:>8.3f}{cd['htmt'][f]:>8.3f}")
    conc = stage["concurrent"]
    if conc.get("status") in ("not-run", "failed"):
        lines.append(f"  concurrent validity: {conc['status']} {conc.get('reason') or conc.get('error', '')}")
    else:
        lines.append(f"  concurrent validity with {conc['criterion']}:")
        lines.append(f"    {'Domain':<26}{'r':>8}{'p':>8}{'lower':>8}{'upper':>8}")
        for r in conc["rows"]:
            lines.append(
                f"    {r['factor_id']:<26}{r['r']:>8.3f}{r['p_value']:>8.3f}{r['ci_lower']:>8.3f}{r['ci_upper']:>8.3f}"
            )
    pred = stage["predictive"]
    if pred.get("status") in ("not-run", "failed"):
        lines.append(f"  predictive validity: {pred['status']} {pred.get('reason') or pred.get('error', '')}")
    else:
        lines.append(f"  predictive validity: {pred['criterion']} on all items, R^2 = {pred['r2']:.3f}, n = {pred['n']}")
        lines.append(f"    {'Item':<10}{'coef':>8}{'p':>8}{'lower':>8}{'upper':>8}   simple R^2")
        simple = {s["name"]: s for s in pred["simple"]}
        for c in pred["coefficients"]:
            s = simple.get(c["name"])
            lines.append(
                f"    {c['name']:<10}{c['coefficient']:>8.3f}{c['p_value']:>8.3f}{c['ci_lower']:>8.3f}"
                f"{c['ci_upper']:>8.3f}   {_f(s['r2']) if s else '-'}"
            )
    lines.append("  sub-verdicts: " + ", ".join(f"{k}={'pass' if v else 'fail'}" for k, v in sorted(stage["sub_verdicts"].items())))
    return lines


_RENDERERS = {
    "content": render_content,
    "adequacy": render_adequacy,
    "dimensionality": render_dimensionality,
    "reliability": render_reliability,
    "validity": render_validity,
}
