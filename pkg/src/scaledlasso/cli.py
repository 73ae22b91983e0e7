"""Command-line front end: ``path``, ``fit``, ``select`` and ``simulate``.

Penalties given with ``--lambda`` and reported in outputs follow
``--lambda-convention``: ``half`` (the default) for
``(1/2)||y - X b||^2 + lam ||b||_1`` and ``paper`` for
``||y - X b||^2 + lam ||b||_1``.

Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure,
4 too many failed simulation trials.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .design import standardize_design
from .exceptions import ConfigError, LassoError, MaxStepsExceeded
from .io import atomic_write, read_data_csv, write_csv
from .path import kkt_check, lars_lasso_path, solve_at
from .risk import candidate_lambdas, evaluate_candidates, log_grid, noise_variance_ce, select_lambda, sure_report
from .scaling import ScalingConfig
from .simulation import SimConfig, run_trials

THREADS_ENV = "SCALEDLASSO_THREADS"
BUNDLED = ("fig1a", "fig1b")

log = logging.getLogger("scaledlasso")


def _to_internal(lam: float, convention: str) -> float:
    return lam / 2.0 if convention == "paper" else lam


def _to_user(lam: float, convention: str) -> float:
    return 2.0 * lam if convention == "paper" else lam


def _load(args):
    data = read_data_csv(args.data, args.response)
    design = standardize_design(data.X, add_intercept=not args.no_intercept)
    names = (["(intercept)"] if design.has_intercept else []) + data.feature_names
    return data, design, names


def _path(args, design, y, lam_min=0.0):
    try:
        return lars_lasso_path(
            design,
            y,
            penalize_intercept=not args.unpenalized_intercept,
            max_steps=args.max_steps,
            lam_min=lam_min,
        )
    except MaxStepsExceeded as exc:
        raise MaxStepsExceeded(f"{exc}; --max-steps truncates the path") from None


def _delta(args, n: int) -> float:
    return 1.0 / n if args.delta is None else args.delta


def _original(design, beta, feature_names) -> dict:
    offset, coef = design.to_original_scale(beta)
    out = {"intercept": float(offset)}
    out["coefficients"] = {name: float(c) for name, c in zip(feature_names, coef)}
    return out


def cmd_path(args) -> int:
    data, design, names = _load(args)
    path = _path(args, design, data.y)
    conv = args.lambda_convention
    rows = []
    k = len(path.unpenalized)
    for i, ev in enumerate(path.events):
        k += 1 if ev.kind == "add" else -1
        rows.append([i, _to_user(ev.lam, conv), ev.kind, names[ev.index], k])
    if path.complete:
        rows.append([len(rows), _to_user(float(path.lambdas[-1]), conv), "end", "", k])
    out = args.out
    write_csv(os.path.join(out, "path.csv"), ["event", "lambda", "kind", "column", "k"], rows)

    coef_rows = []
    for j, lam in enumerate(path.lambdas):
        offset, coef = design.to_original_scale(path.coefs[:, j])
        coef_rows.append([_to_user(float(lam), conv), float(offset)] + [float(c) for c in coef])
    write_csv(os.path.join(out, "coefficients.csv"), ["lambda", "intercept"] + data.feature_names, coef_rows)
    print(f"{len(path.events)} events, lambda_max={_to_user(path.lambda_max, conv):.6g} -> {out}")
    return 0


def _fit_document(design, data, fit, rep, args, sigma2_ce) -> dict:
    conv = args.lambda_convention
    doc = {
        "lambda": _to_user(fit.lam, conv),
        "lambda_convention": conv,
        "k": fit.k_active,
        "alpha_hat": rep.alpha_hat,
        "delta": _delta(args, design.n),
        "sure_plain": rep.sure_plain,
        "sure_scaled": rep.sure_scaled,
        "sigma2_ce": sigma2_ce,
        "sigma2_used": rep.sigma2_used,
        "lasso": _original(design, fit.beta, data.feature_names),
        "scaled": _original(design, rep.alpha_hat * fit.beta, data.feature_names),
    }
    return doc


def _sigma2(args, design, y):
    ce = noise_variance_ce(design, y, args.gamma).sigma2
    return ce, (ce if args.sigma2 is None else args.sigma2)


def _emit(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with atomic_write(out) as fh:
            fh.write(text)


def cmd_fit(args) -> int:
    data, design, _ = _load(args)
    lam = _to_internal(args.lam, args.lambda_convention)
    path = _path(args, design, data.y, lam_min=lam)
    fit = solve_at(path, design, data.y, lam)
    ce, s2 = _sigma2(args, design, data.y)
    rep = sure_report(fit, data.y, s2, ScalingConfig(_delta(args, design.n)))
    doc = _fit_document(design, data, fit, rep, args, ce)
    doc["kkt_max_violation"] = kkt_check(fit, design, data.y).violation
    _emit(doc, args.out)
    return 0


def _parse_grid(text):
    try:
        lo, hi, count = text.split(",")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigError(f"--grid expects lo,hi,count, got {text!r}") from None


def cmd_select(args) -> int:
    data, design, _ = _load(args)
    if args.grid is None:
        path = _path(args, design, data.y)
        lams = candidate_lambdas(path)
    else:
        lo, hi, count = _parse_grid(args.grid)
        conv = args.lambda_convention
        grid = log_grid(_to_internal(lo, conv), _to_internal(hi, conv), count)
        path = _path(args, design, data.y, lam_min=float(grid.min()))
        lams = candidate_lambdas(path, grid)
    ce, s2 = _sigma2(args, design, data.y)
    cfg = ScalingConfig(_delta(args, design.n))
    reports = evaluate_candidates(path, design, data.y, lams, s2, cfg)
    lam, i = select_lambda(reports, args.criterion)
    fit = solve_at(path, design, data.y, lam)
    doc = {"criterion": args.criterion, "n_candidates": len(reports)}
    doc.update(_fit_document(design, data, fit, reports[i], args, ce))
    _emit(doc, args.out)
    return 0


def _threads(config_dict) -> int:
    if "n_jobs" in config_dict:
        return config_dict["n_jobs"]
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def load_run_config(source) -> dict:
    """JSON run configuration from a file path or a bundled name (``fig1a``, ``fig1b``)."""
    if source in BUNDLED:
        text = resources.files("scaledlasso").joinpath("configs", f"{source}.json").read_text()
    else:
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def cmd_simulate(args) -> int:
    doc = load_run_config(args.config)
    out = doc.pop("out", None)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.delta is not None:
        doc["delta"] = args.delta
    if args.gamma is not None:
        doc["gamma"] = args.gamma
    out = args.out or out
    if out is None:
        raise ConfigError("no output directory: pass --out or set 'out' in the config")
    doc["n_jobs"] = _threads(doc)
    config = SimConfig.from_dict(doc)
    report = run_trials(config)
    report.to_csv(os.path.join(out, "report.csv"))
    report.to_json(os.path.join(out, "report.json"))
    s = report.to_dict()["summary"]
    print(
        f"{config.trials} trials, {len(report.failures)} failed; mean selected k "
        f"plain {s['mean_selected_k_plain']:.3f}, scaled {s['mean_selected_k_scaled']:.3f} -> {out}"
    )
    return 0


def _data_options(p, *, lam=False):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--response", help="response column (default: last column)")
    p.add_argument("--no-intercept", action="store_true", help="do not add an intercept column")
    p.add_argument(
        "--unpenalized-intercept", action="store_true", help="leave the intercept out of the l1 penalty"
    )
    p.add_argument("--lambda-convention", choices=("half", "paper"), default="half")
    p.add_argument("--max-steps", type=int, help="stop the path after this many segments")
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, required=True)


def _risk_options(p):
    p.add_argument("--delta", type=float, help="expansion stabilizer (default 1/n)")
    p.add_argument("--gamma", type=float, default=1e-6, help="ridge parameter of the noise estimate")
    p.add_argument("--sigma2", type=float, help="known noise variance (default: ridge-based estimate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scaledlasso", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("path", help="full LARS-LASSO path")
    _data_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("fit", help="LASSO and scaled fit at one lambda")
    _data_options(p, lam=True)
    _risk_options(p)
    p.add_argument("--out", help="JSON output file (default: stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="choose lambda by minimizing SURE")
    _data_options(p)
    _risk_options(p)
    p.add_argument("--criterion", choices=("plain", "scaled"), default="scaled")
    p.add_argument("--grid", help="log grid lo,hi,count instead of the path segment midpoints")
    p.add_argument("--out", help="JSON output file (default: stdout)")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("simulate", help="Monte-Carlo study on the Gaussian-basis problem")
    p.add_argument("--config", default="fig1a", help="JSON config file or one of: " + ", ".join(BUNDLED))
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except LassoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
