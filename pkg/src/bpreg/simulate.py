"""Monte Carlo harness for the small-sample bias study.

Protocol: a fixed design with intercepts and U(0,1) covariates shared
between the two submodels, true parameters all one (by default), log
links, m replicates.  Each replicate draws a response, fits the MLE, the
corrective and preventive corrections, and a warp-speed parametric
bootstrap correction (a single resample per replicate,
theta_b = 2 theta_hat - theta_hat_star).

Replicates use RNG streams spawned from the study seed and the final
reduction is ordered by replicate index, so reports are bit-identical
for any worker count (``BPREG_THREADS``; 0 means one worker per CPU).
"""

import concurrent.futures
import csv
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import bias, bpdist, model
from .exceptions import (
    DomainError,
    ExcessiveFailures,
    NonConvergence,
    SingularInformation,
)
from .fit import FitOptions, fit_firth, fit_mle

ESTIMATORS = ("mle", "cox_snell", "firth", "warp_boot")
_MAX_REDRAWS = 10
_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class McConfig:
    """Study configuration.

    ``p`` and ``q`` count the non-intercept covariates of the two
    submodels; both designs always include an intercept, so the study
    estimates p + q + 2 parameters.  ``true_theta`` defaults to all ones.
    """

    n: int
    p: int = 1
    q: int = 1
    m: int = 2000
    seed: Optional[int] = None
    true_theta: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")
        if self.n <= self.p + self.q + 2:
            raise ValueError("need n > p + q + 2")
        if self.m < 1:
            raise ValueError("need m >= 1")
        theta = self.true_theta
        if theta is None:
            theta = np.ones(self.n_params)
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_params,):
            raise ValueError(f"true_theta must have length {self.n_params}")
        object.__setattr__(self, "true_theta", theta)

    @property
    def n_params(self):
        return self.p + self.q + 2

    def param_names(self):
        return [f"beta{j}" for j in range(self.p + 1)] + [
            f"nu{j}" for j in range(self.q + 1)
        ]


def make_design(cfg):
    """Draw the fixed design once from the study seed.

    One U(0,1) draw per observation and covariate index; a covariate
    appearing in both submodels reuses the same draw.
    """
    design_seq, _ = _split_seed(cfg)
    rng = np.random.Generator(np.random.PCG64(design_seq))
    covariates = rng.random((cfg.n, max(cfg.p, cfg.q)))
    ones = np.ones((cfg.n, 1))
    X = np.hstack([ones, covariates[:, : cfg.p]])
    Z = np.hstack([ones, covariates[:, : cfg.q]])
    return X, Z


def _split_seed(cfg):
    root = np.random.SeedSequence(cfg.seed)
    design_seq, replicate_root = root.spawn(2)
    return design_seq, replicate_root


def _replicate_batch(payload):
    """Run a contiguous block of replicates; returns one record per replicate."""
    (X, Z, mu_true, phi_true, opts, seeds, indices) = payload
    out = []
    for r, child in zip(indices, seeds):
        out.append(_one_replicate(X, Z, mu_true, phi_true, opts, child, r))
    return out


def _one_replicate(X, Z, mu_true, phi_true, opts, child, r):
    rng = np.random.Generator(np.random.PCG64(child))
    y = bpdist.sample_bp(mu_true, phi_true, rng)
    try:
        spec = model.ModelSpec(y, X, Z)
        mle = fit_mle(spec, opts)
        cox = bias.corrected_estimate(mle.theta, spec)
        firth = fit_firth(spec, opts, init=mle.theta)
        mu_hat, phi_hat = model.fitted_values(spec, mle.theta)
        star = None
        last_error = None
        for _ in range(1 + _MAX_REDRAWS):
            y_star = bpdist.sample_bp(mu_hat, phi_hat, rng)
            try:
                spec_star = model.ModelSpec(y_star, X, Z)
                star = fit_mle(spec_star, opts, init=mle.theta)
            except (NonConvergence, SingularInformation, DomainError) as exc:
                last_error = exc
                continue
            break
        if star is None:
            raise NonConvergence(
                f"bootstrap resample failed after {_MAX_REDRAWS} redraws"
            ) from last_error
    except (NonConvergence, SingularInformation, DomainError, ArithmeticError) as exc:
        return {"replicate": r, "failed": True, "reason": str(exc)}
    theta_hat = mle.theta.theta
    theta_star = star.theta.theta
    return {
        "replicate": r,
        "failed": False,
        "mle": theta_hat,
        "cox_snell": cox.theta,
        "firth": firth.theta.theta,
        "warp_boot": 2.0 * theta_hat - theta_star,
        "boot_star": theta_star,
        "firth_max_score": firth.max_abs_score,
    }


@dataclass
class McSamples:
    """Raw per-replicate output of a study.

    Arrays are indexed by successful replicate, in replicate order;
    ``replicate_index`` maps rows back to the original replicate number
    (1-based).  ``boot_star`` stores theta_hat_star so the warp-speed
    estimate is reconstructible as 2 mle - boot_star.
    """

    config: McConfig
    estimates: dict
    boot_star: np.ndarray
    firth_max_score: np.ndarray
    replicate_index: np.ndarray
    failures: list = field(default_factory=list)


def _worker_count():
    raw = os.environ.get("BPREG_THREADS", "").strip()
    if not raw:
        return 1
    value = int(raw)
    if value < 0:
        raise ValueError("BPREG_THREADS must be non-negative")
    if value == 0:
        return os.cpu_count() or 1
    return value


def simulate_replicates(cfg, opts=None):
    """Run the study and keep every per-replicate estimate.

    Failed replicates (non-convergent or singular fits, after the
    bootstrap redraw budget) are excluded from the arrays and recorded;
    the run aborts when they exceed 1 percent of m.

    The default options raise the iteration budget well above the
    single-fit default: at these sample sizes the scoring iteration has
    a linear tail whose rate occasionally approaches 1, and a replicate
    that merely needs more polishing iterations should not count as a
    failure.  Stopping tolerances are unchanged.
    """
    opts = opts or FitOptions(max_iter=2000)
    X, Z = make_design(cfg)
    k = cfg.n_params
    beta_true = cfg.true_theta[: cfg.p + 1]
    nu_true = cfg.true_theta[cfg.p + 1 :]
    lm = model.get_link("log")
    mu_true = lm.inv(X @ beta_true)
    phi_true = lm.inv(Z @ nu_true)
    _, replicate_root = _split_seed(cfg)
    seeds = replicate_root.spawn(cfg.m)
    workers = _worker_count()
    records = []
    if workers <= 1 or cfg.m < 2 * workers:
        records = _replicate_batch(
            (X, Z, mu_true, phi_true, opts, seeds, range(1, cfg.m + 1))
        )
    else:
        chunk = max(1, cfg.m // (workers * 8))
        payloads = []
        for start in range(0, cfg.m, chunk):
            stop = min(start + chunk, cfg.m)
            payloads.append(
                (
                    X,
                    Z,
                    mu_true,
                    phi_true,
                    opts,
                    seeds[start:stop],
                    range(start + 1, stop + 1),
                )
            )
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for batch in pool.map(_replicate_batch, payloads):
                records.extend(batch)
    failures = [(rec["replicate"], rec["reason"]) for rec in records if rec["failed"]]
    if len(failures) > _FAILURE_FRACTION * cfg.m:
        raise ExcessiveFailures(
            f"{len(failures)} of {cfg.m} replicates failed "
            f"(more than {_FAILURE_FRACTION:.0%})"
        )
    good = [rec for rec in records if not rec["failed"]]
    estimates = {
        name: np.array([rec[name] for rec in good]).reshape(len(good), k)
        for name in ESTIMATORS
    }
    return McSamples(
        config=cfg,
        estimates=estimates,
        boot_star=np.array([rec["boot_star"] for rec in good]).reshape(len(good), k),
        firth_max_score=np.array([rec["firth_max_score"] for rec in good]),
        replicate_index=np.array([rec["replicate"] for rec in good], dtype=np.int64),
        failures=failures,
    )


@dataclass
class McReport:
    """Per-parameter mean, bias, variance and MSE for each estimator.

    Moments are population formulas over the successful replicates, so
    mse = variance + bias^2 holds exactly.
    """

    config: McConfig
    param_names: list
    stats: dict
    m_used: int
    n_failures: int

    def to_json_dict(self):
        cfg = self.config
        return {
            "schema_version": "1",
            "kind": "simulation_report",
            "config": {
                "n": cfg.n,
                "p": cfg.p,
                "q": cfg.q,
                "m": cfg.m,
                "true_theta": cfg.true_theta.tolist(),
            },
            "seed": cfg.seed,
            "param_names": list(self.param_names),
            "estimators": {
                name: {k: v.tolist() for k, v in table.items()}
                for name, table in self.stats.items()
            },
            "m_used": self.m_used,
            "n_failures": self.n_failures,
        }

    def to_text(self):
        lines = []
        cfg = self.config
        lines.append(
            f"simulation study: n={cfg.n} p={cfg.p} q={cfg.q} m={cfg.m} "
            f"used={self.m_used} failures={self.n_failures}"
        )
        header = f"{'':12s}" + "".join(f"{name:>12s}" for name in ESTIMATORS)
        for j, pname in enumerate(self.param_names):
            lines.append("")
            lines.append(f"{pname} (true {cfg.true_theta[j]:.4f})")
            lines.append(header)
            for stat in ("mean", "bias", "variance", "mse"):
                row = f"{stat:12s}" + "".join(
                    f"{self.stats[name][stat][j]:12.4f}" for name in ESTIMATORS
                )
                lines.append(row)
        return "\n".join(lines) + "\n"


def summarize(samples):
    """Reduce raw replicate estimates to the report table."""
    cfg = samples.config
    true = cfg.true_theta
    stats = {}
    for name in ESTIMATORS:
        est = samples.estimates[name]
        mean = est.mean(axis=0)
        bias_vec = mean - true
        variance = est.var(axis=0)
        mse = np.mean((est - true) ** 2, axis=0)
        stats[name] = {
            "mean": mean,
            "bias": bias_vec,
            "variance": variance,
            "mse": mse,
        }
    return McReport(
        config=cfg,
        param_names=cfg.param_names(),
        stats=stats,
        m_used=samples.replicate_index.shape[0],
        n_failures=len(samples.failures),
    )


def run_study(cfg, opts=None):
    """Run the full protocol and return the summary report."""
    return summarize(simulate_replicates(cfg, opts))


def export_replicates(cfg, path, samples=None, opts=None):
    """Write one CSV row per replicate per estimator.

    Columns: replicate, estimator, theta_1..theta_k.  Passing ``samples``
    reuses an existing run instead of recomputing.
    """
    if samples is None:
        samples = simulate_replicates(cfg, opts)
    k = samples.config.n_params
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["replicate", "estimator"] + [f"theta_{j + 1}" for j in range(k)]
        )
        for row, r in enumerate(samples.replicate_index):
            for name in ESTIMATORS:
                writer.writerow(
                    [int(r), name]
                    + [repr(float(v)) for v in samples.estimates[name][row]]
                )
    return path


def report_to_json(report, path):
    """Serialize a report deterministically (sorted keys, 2-space indent)."""
    with open(path, "w") as handle:
        json.dump(report.to_json_dict(), handle, sort_keys=True, indent=2)
        handle.write("\n")
    return path
