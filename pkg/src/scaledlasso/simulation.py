"""Monte-Carlo experiments on a Gaussian-basis curve-fitting problem.

The design has ``m`` Gaussian bumps ``exp(-(u - xi)^2 / (2 tau))`` evaluated
at ``n`` equidistant inputs on ``[-5, 5]``, with centers on every
``(n/m)``-th input.  The columns are standardized and an intercept column is
put in front.  The response is a sparse combination of the raw bumps plus
Gaussian noise.

Every trial draws its noise from a generator keyed by ``(seed, trial)`` so
results do not depend on execution order or on the number of workers.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .design import DesignMatrix, standardize_design
from .exceptions import (
    ConfigError,
    DegenerateDenominator,
    IndivisibleGrid,
    LassoError,
    LengthMismatch,
    TrialFailureBudgetExceeded,
)
from .path import lars_lasso_path, solve_at, solve_at_knot
from .risk import log_grid, noise_variance_ce, select_lambda, sure_report
from .scaling import ScalingConfig, expansion_bound

log = logging.getLogger(__name__)

LAMBDA_MODES = ("path_steps", "path_midpoints", "log_grid")


@dataclass(frozen=True)
class SimConfig:
    """One synthetic experiment.

    ``k_star`` holds 1-based basis indices.  ``delta=None`` means ``1/n``.
    ``lambda_grid`` is ``(min, max, count)`` in the half-quadratic
    convention and is only read when ``lambda_mode == "log_grid"``.
    ``"path_steps"`` records the fit at the lower knot of each of the first
    ``n_steps`` LARS-LASSO segments (as a step-wise LARS report would);
    ``"path_midpoints"`` uses the segment midpoints instead.
    """

    n: int = 100
    m: int = 50
    tau: float = 0.1
    k_star: tuple = (5, 18, 31, 45)
    beta_star: tuple = (1.0, -2.0, 2.0, -1.0)
    sigma2: float = 1.0
    delta: float | None = None
    gamma: float = 1e-6
    trials: int = 200
    seed: int = 20190801
    lambda_mode: str = "path_steps"
    lambda_grid: tuple | None = None
    n_steps: int = 30
    penalize_intercept: bool = True
    scaling: bool = True
    n_jobs: int = 1
    failure_budget: float = 0.01

    def __post_init__(self):
        for name in ("n", "m", "trials", "n_steps", "n_jobs"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigError(f"{name} must be an integer")
        object.__setattr__(self, "k_star", tuple(int(k) for k in self.k_star))
        object.__setattr__(self, "beta_star", tuple(float(b) for b in self.beta_star))
        if self.lambda_grid is not None:
            object.__setattr__(self, "lambda_grid", tuple(self.lambda_grid))
        if self.n < 1 or self.m < 1 or self.m > self.n:
            raise ConfigError("need 1 <= m <= n")
        if self.n % self.m:
            raise IndivisibleGrid(f"n={self.n} is not a multiple of m={self.m}")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        if len(self.k_star) != len(self.beta_star):
            raise ConfigError("k_star and beta_star differ in length")
        if len(set(self.k_star)) != len(self.k_star) or any(not 1 <= k <= self.m for k in self.k_star):
            raise ConfigError("k_star must be distinct indices in 1..m")
        if not self.sigma2 >= 0:
            raise ConfigError("sigma2 must be nonnegative")
        if self.delta is not None and not self.delta > 0:
            raise ConfigError("delta must be positive")
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be nonzero")
        if self.lambda_mode not in LAMBDA_MODES:
            raise ConfigError(f"lambda_mode must be one of {LAMBDA_MODES}")
        if self.lambda_mode == "log_grid":
            if self.lambda_grid is None or len(self.lambda_grid) != 3:
                raise ConfigError("log_grid mode needs lambda_grid = (min, max, count)")
            log_grid(float(self.lambda_grid[0]), float(self.lambda_grid[1]), int(self.lambda_grid[2]))
        if not 0 <= self.failure_budget < 1:
            raise ConfigError("failure_budget must be in [0, 1)")

    @property
    def delta_value(self) -> float:
        return 1.0 / self.n if self.delta is None else float(self.delta)

    @property
    def scaling_config(self) -> ScalingConfig:
        return ScalingConfig(self.delta_value)

    def grid(self) -> np.ndarray:
        lo, hi, count = self.lambda_grid
        return log_grid(float(lo), float(hi), int(count))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["k_star"] = list(self.k_star)
        d["beta_star"] = list(self.beta_star)
        if self.lambda_grid is not None:
            d["lambda_grid"] = list(self.lambda_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def basis_centers(n: int, m: int):
    """Inputs ``u`` (equidistant on [-5, 5]) and centers ``xi_j = u_{(n/m) j}``."""
    if n % m:
        raise IndivisibleGrid(f"n={n} is not a multiple of m={m}")
    u = np.linspace(-5.0, 5.0, n)
    xi = u[(n // m) * np.arange(1, m + 1) - 1]
    return u, xi


def gaussian_design(n: int, m: int, tau: float) -> np.ndarray:
    """Raw ``n x m`` matrix with entries ``exp(-(u_i - xi_j)^2 / (2 tau))``."""
    if not tau > 0:
        raise ConfigError("tau must be positive")
    u, xi = basis_centers(n, m)
    return np.exp(-((u[:, None] - xi[None, :]) ** 2) / (2.0 * tau))


@dataclass(frozen=True, eq=False)
class Problem:
    """Design, standardized design and noiseless target of a configuration."""

    raw: np.ndarray
    design: DesignMatrix
    mu_true: np.ndarray


def build_problem(config: SimConfig) -> Problem:
    raw = gaussian_design(config.n, config.m, config.tau)
    # wide kernels make X'X numerically singular; LARS drops collinear entrants instead
    design = standardize_design(raw, add_intercept=True, rank_tol=None)
    return Problem(raw=raw, design=design, mu_true=target(raw, config))


def target(raw, config: SimConfig) -> np.ndarray:
    coef = np.zeros(config.m)
    coef[np.array(config.k_star) - 1] = config.beta_star
    return raw @ coef


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial_index),)))


def generate_data(raw, config: SimConfig, trial_index: int) -> np.ndarray:
    """Noisy response for one trial; identical for identical ``(seed, trial_index)``."""
    mu = target(raw, config)
    noise = trial_rng(config.seed, trial_index).standard_normal(mu.size)
    return mu + np.sqrt(config.sigma2) * noise


def actual_risk(mu_hat, mu_true) -> float:
    """``||mu_hat - mu_true||^2 / n``."""
    mu_hat = np.asarray(mu_hat, dtype=float)
    mu_true = np.asarray(mu_true, dtype=float)
    if mu_hat.shape != mu_true.shape:
        raise LengthMismatch(f"shapes {mu_hat.shape} and {mu_true.shape} differ")
    d = mu_hat - mu_true
    return float(d @ d / d.size)


# per-record quantities produced by one trial
FIELDS = (
    "lam",
    "k",
    "alpha_minus_one",
    "risk_plain",
    "risk_scaled",
    "sure_plain",
    "sure_scaled",
    "sure_plain_true",
    "sure_scaled_true",
)


def _path_for(problem: Problem, y, config: SimConfig):
    if config.lambda_mode in ("path_steps", "path_midpoints"):
        return lars_lasso_path(
            problem.design,
            y,
            penalize_intercept=config.penalize_intercept,
            max_steps=config.n_steps,
            on_collinear="drop",
        )
    return lars_lasso_path(
        problem.design,
        y,
        penalize_intercept=config.penalize_intercept,
        lam_min=float(config.grid().min()),
        on_collinear="drop",
    )


def _record_fits(path, problem: Problem, y, config: SimConfig):
    """``(fit, at_knot)`` pairs for every record of one trial."""
    X = problem.design
    if config.lambda_mode == "path_steps":
        count = min(config.n_steps, len(path.segments))
        return [(solve_at_knot(path, X, y, s + 1), True) for s in range(count)]
    if config.lambda_mode == "path_midpoints":
        lams = path.midpoints()[: config.n_steps]
    else:
        lams = config.grid()
    return [(solve_at(path, X, y, lam), False) for lam in lams]


def run_trial(problem: Problem, config: SimConfig, trial_index: int) -> dict:
    """All per-record statistics of one trial plus its SURE-selected models."""
    y = generate_data(problem.raw, config, trial_index)
    sigma2_hat = noise_variance_ce(problem.design, y, config.gamma).sigma2
    path = _path_for(problem, y, config)
    fits = _record_fits(path, problem, y, config)
    cfg = config.scaling_config
    alpha = None if config.scaling else 1.0
    n_rec = len(fits) if config.lambda_mode == "log_grid" else config.n_steps
    out = {f: np.full(n_rec, np.nan) for f in FIELDS}
    reports = []
    for r, (fit, at_knot) in enumerate(fits):
        rep = sure_report(fit, y, sigma2_hat, cfg, alpha=alpha, allow_knot=at_knot)
        rep_true = sure_report(fit, y, config.sigma2, cfg, alpha=alpha, allow_knot=at_knot)
        reports.append(rep)
        mu_scaled = rep.alpha_hat * fit.mu
        out["lam"][r] = fit.lam
        out["k"][r] = fit.k_active
        out["alpha_minus_one"][r] = rep.alpha_hat - 1.0
        out["risk_plain"][r] = actual_risk(fit.mu, problem.mu_true)
        out["risk_scaled"][r] = actual_risk(mu_scaled, problem.mu_true)
        out["sure_plain"][r] = rep.sure_plain
        out["sure_scaled"][r] = rep.sure_scaled
        out["sure_plain_true"][r] = rep_true.sure_plain
        out["sure_scaled_true"][r] = rep_true.sure_scaled
    selection = {"trial": int(trial_index), "sigma2_hat": sigma2_hat}
    for crit in ("plain", "scaled"):
        lam, i = select_lambda(reports, crit)
        selection[f"{crit}_lambda"] = float(lam)
        selection[f"{crit}_k"] = int(out["k"][i])
        selection[f"{crit}_risk"] = float(out[f"risk_{crit}"][i])
    out["selection"] = selection
    return out


@dataclass(eq=False)
class TrialReport:
    """Per-record means and standard errors over the Monte-Carlo trials.

    ``records`` maps column names to arrays of equal length (one entry per
    path step or grid value): ``count`` trials contributed to each record,
    ``<field>`` is the mean and ``<field>_se`` its standard error, and
    ``diff_<criterion>[_true]_se`` the standard error of the per-trial
    difference SURE - actual risk.
    """

    config: SimConfig
    records: dict
    selections: list
    failures: list = field(default_factory=list)

    @property
    def n_records(self) -> int:
        return int(self.records["count"].size)

    def column(self, name) -> np.ndarray:
        return self.records[name]

    def selection_array(self, key) -> np.ndarray:
        return np.array([s[key] for s in self.selections])

    def csv_rows(self):
        names = list(self.records)
        yield ["record"] + names
        for i in range(self.n_records):
            yield [str(i)] + [_fmt(self.records[k][i]) for k in names]

    def to_csv(self, path):
        from .io import atomic_write

        with atomic_write(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerows(self.csv_rows())

    def to_dict(self) -> dict:
        config = self.config.to_dict()
        # the worker count never changes the numbers, so it stays out of the report
        config.pop("n_jobs")
        return {
            "config": config,
            "records": {k: [_json_num(x) for x in v] for k, v in self.records.items()},
            "selections": self.selections,
            "failures": [{"trial": t, "error": e} for t, e in self.failures],
            "summary": {
                "mean_sigma2_hat": float(np.mean(self.selection_array("sigma2_hat"))),
                "mean_selected_k_plain": float(np.mean(self.selection_array("plain_k"))),
                "mean_selected_k_scaled": float(np.mean(self.selection_array("scaled_k"))),
                "mean_selected_risk_plain": float(np.mean(self.selection_array("plain_risk"))),
                "mean_selected_risk_scaled": float(np.mean(self.selection_array("scaled_risk"))),
            },
        }

    def to_json(self, path):
        from .io import atomic_write

        with atomic_write(path) as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=False)
            fh.write("\n")


def _fmt(x) -> str:
    x = float(x)
    return "" if np.isnan(x) else f"{x:.17g}"


def _json_num(x):
    x = float(x)
    return None if np.isnan(x) else x


def _mean_se(a):
    """Column-wise count, mean and standard error, skipping NaN entries."""
    ok = ~np.isnan(a)
    count = ok.sum(axis=0)
    filled = np.where(ok, a, 0.0)
    safe = np.maximum(count, 1)
    mean = filled.sum(axis=0) / safe
    var = np.where(ok, (a - mean) ** 2, 0.0).sum(axis=0) / np.maximum(count - 1, 1)
    se = np.where(count > 1, np.sqrt(var / safe), 0.0)
    return count, np.where(count > 0, mean, np.nan), se


def _map_trials(fn, config: SimConfig, items):
    if config.n_jobs == 1:
        return [fn(i) for i in items]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=config.n_jobs)(delayed(fn)(i) for i in items)


def _safe_trial(problem, config, i):
    try:
        return run_trial(problem, config, i)
    except LassoError as exc:
        return exc


def run_trials(config: SimConfig) -> TrialReport:
    """Run ``config.trials`` independent trials and aggregate them by record.

    Raises
    ------
    TrialFailureBudgetExceeded
        More than ``failure_budget`` of the trials raised a solver error.
    """
    problem = build_problem(config)
    results = _map_trials(lambda i: _safe_trial(problem, config, i), config, range(config.trials))
    failures = [(i, f"{type(r).__name__}: {r}") for i, r in enumerate(results) if isinstance(r, Exception)]
    for t, msg in failures:
        log.warning("trial %d failed: %s", t, msg)
    if len(failures) > config.failure_budget * config.trials:
        raise TrialFailureBudgetExceeded(f"{len(failures)} of {config.trials} trials failed")
    good = [r for r in results if not isinstance(r, Exception)]

    stacks = {f: np.vstack([r[f] for r in good]) for f in FIELDS}
    count, _, _ = _mean_se(stacks["k"])
    keep = count > 0
    records = {"count": count[keep]}
    for f in FIELDS:
        _, mean, se = _mean_se(stacks[f])
        records[f] = mean[keep]
        if f != "lam":
            records[f + "_se"] = se[keep]
    for crit in ("plain", "scaled"):
        for suffix in ("", "_true"):
            diff = stacks[f"sure_{crit}{suffix}"] - stacks[f"risk_{crit}"]
            _, mean, se = _mean_se(diff)
            records[f"diff_{crit}{suffix}"] = mean[keep]
            records[f"diff_{crit}{suffix}_se"] = se[keep]
    return TrialReport(config=config, records=records, selections=[r["selection"] for r in good], failures=failures)


@dataclass(frozen=True, eq=False)
class FixedLambdaSamples:
    """Per-trial LASSO statistics at fixed lambdas, arrays of shape (trials, len(lambdas))."""

    lambdas: np.ndarray
    mu_y: np.ndarray
    mu_eps: np.ndarray
    mu_mu_true: np.ndarray
    mu_norm2: np.ndarray
    k: np.ndarray
    alpha_hat: np.ndarray
    n: int
    mu_true_norm2: float


def fixed_lambda_samples(config: SimConfig, lambdas, problem: Problem | None = None) -> FixedLambdaSamples:
    problem = problem or build_problem(config)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    cfg = config.scaling_config

    def one(i):
        y = generate_data(problem.raw, config, i)
        eps = y - problem.mu_true
        path = lars_lasso_path(
            problem.design,
            y,
            penalize_intercept=config.penalize_intercept,
            lam_min=float(lambdas.min()),
            on_collinear="drop",
        )
        rows = []
        for lam in lambdas:
            fit = solve_at(path, problem.design, y, lam)
            mu = fit.mu
            delta = cfg.value(mu.size)
            alpha = (mu @ y + delta) / (mu @ mu + delta)
            rows.append((mu @ y, mu @ eps, mu @ problem.mu_true, mu @ mu, fit.k_active, alpha))
        return np.array(rows)

    data = np.stack(_map_trials(one, config, range(config.trials)))
    return FixedLambdaSamples(
        lambdas=lambdas,
        mu_y=data[:, :, 0],
        mu_eps=data[:, :, 1],
        mu_mu_true=data[:, :, 2],
        mu_norm2=data[:, :, 3],
        k=data[:, :, 4],
        alpha_hat=data[:, :, 5],
        n=config.n,
        mu_true_norm2=float(problem.mu_true @ problem.mu_true),
    )


def _alpha_opt(samples: FixedLambdaSamples, sigma2: float) -> np.ndarray:
    denom = samples.mu_norm2.mean(axis=0)
    if np.any(denom == 0):
        raise DegenerateDenominator("E||mu_hat||^2 is zero at some lambda")
    return (samples.mu_y.mean(axis=0) - sigma2 * samples.k.mean(axis=0)) / denom


def estimate_alpha_opt(config: SimConfig, lam, samples: FixedLambdaSamples | None = None):
    """Monte-Carlo plug-in of ``(E mu'y - sigma2 E k) / E||mu||^2`` at fixed lambda.

    Returns a float for a scalar ``lam`` and an array otherwise.
    """
    samples = samples or fixed_lambda_samples(config, lam)
    out = _alpha_opt(samples, config.sigma2)
    return float(out[0]) if np.ndim(lam) == 0 else out


@dataclass(frozen=True)
class RiskGap:
    """Both sides of ``R(lam, 1) - R(lam, alpha_opt) = (alpha_opt - 1)^2 E||mu||^2 / n``.

    ``se`` is the Monte-Carlo standard error of ``lhs - rhs``.
    """

    lam: float
    alpha_opt: float
    lhs: float
    rhs: float
    se: float

    def __iter__(self):
        return iter((self.lhs, self.rhs))


def risk_gap_oracle(config: SimConfig, lam, samples: FixedLambdaSamples | None = None):
    """Monte-Carlo check of the risk reduction achieved by the optimal scaling.

    ``lhs`` uses the actual risks of ``mu`` and ``alpha_opt * mu`` against
    the known target; ``rhs`` the closed form.  Their difference reduces to
    ``2 (1 - alpha_opt) mean(mu'eps - sigma2 k) / n``, whose expectation is
    zero by Stein's identity, so ``se`` is taken from that per-trial term.
    Returns a :class:`RiskGap` for scalar ``lam`` and a list otherwise.
    """
    samples = samples or fixed_lambda_samples(config, lam)
    alpha = _alpha_opt(samples, config.sigma2)
    n = samples.n
    T = samples.mu_norm2.shape[0]
    m2 = samples.mu_norm2
    c = samples.mu_mu_true
    t2 = samples.mu_true_norm2
    risk1 = (m2 - 2 * c + t2) / n
    risk_a = (alpha**2 * m2 - 2 * alpha * c + t2) / n
    lhs = risk1.mean(axis=0) - risk_a.mean(axis=0)
    rhs = (alpha - 1.0) ** 2 * m2.mean(axis=0) / n
    u = 2.0 * (1.0 - alpha) * (samples.mu_eps - config.sigma2 * samples.k) / n
    se = u.std(axis=0, ddof=1) / np.sqrt(T) if T > 1 else np.zeros_like(lhs)
    gaps = [
        RiskGap(float(l), float(a), float(x), float(r), float(s))
        for l, a, x, r, s in zip(samples.lambdas, alpha, lhs, rhs, se)
    ]
    return gaps[0] if np.ndim(lam) == 0 else gaps


@dataclass(frozen=True, eq=False)
class ExpansionStudy:
    lambdas: np.ndarray
    mean_alpha_minus_one: np.ndarray
    se: np.ndarray
    bound: np.ndarray


def expansion_study(config: SimConfig, lambdas, samples: FixedLambdaSamples | None = None) -> ExpansionStudy:
    """Mean expansion ``alpha_hat - 1`` at fixed lambdas next to its upper bound."""
    problem = build_problem(config)
    samples = samples or fixed_lambda_samples(config, lambdas, problem)
    a1 = samples.alpha_hat - 1.0
    T = a1.shape[0]
    cfg = config.scaling_config
    return ExpansionStudy(
        lambdas=samples.lambdas,
        mean_alpha_minus_one=a1.mean(axis=0),
        se=a1.std(axis=0, ddof=1) / np.sqrt(T) if T > 1 else np.zeros(a1.shape[1]),
        bound=np.array([expansion_bound(problem.design, lam, cfg) for lam in samples.lambdas]),
    )
