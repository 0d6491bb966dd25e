"""Command line entry points.

Two subcommands: ``fit`` estimates a model from a CSV file and prints a
comparison table of the requested estimators, ``simulate`` runs the
Monte Carlo bias study and writes its report files into a directory.

Exit status: 0 when everything requested converged, 1 when at least one
estimation method failed, 2 for data or configuration errors.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import simulate as mc
from .exceptions import (
    DomainError,
    ExcessiveFailures,
    InvalidData,
    NonConvergence,
    NonPositiveResponse,
    ParseError,
    RaggedRows,
    SingularInformation,
)
from .fit import FitOptions, fit_bootstrap, fit_cox_snell, fit_firth, fit_mle
from .model import ModelSpec

SCHEMA_VERSION = "1"
METHOD_ORDER = ("mle", "cox_snell", "firth", "boot")
_DRIVERS = {
    "mle": fit_mle,
    "cox_snell": fit_cox_snell,
    "firth": fit_firth,
    "boot": fit_bootstrap,
}
_COL = 13


@dataclass
class Dataset:
    """Numeric columns of one CSV file, keyed by header name.

    Columns whose cells do not all parse as finite numbers are excluded
    and remembered in ``rejected`` together with the location of their
    first offending cell, so that referencing one later yields a located
    error while unused label columns stay harmless.
    """

    columns: dict
    n: int
    response: str
    rejected: dict


def load_csv(path, response):
    """Read a CSV with a header row, keeping the fully numeric columns.

    Every row must match the header width.  A column joins the dataset
    when every cell parses as a finite decimal real; other columns are
    set aside and only raise when actually used.  The response column
    must be present, numeric and strictly positive.  Errors carry
    1-based file line numbers (the header is line 1).
    """
    with open(path, "r", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        if len(set(header)) != len(header):
            raise ParseError("duplicate column names in header", line=1)
        width = len(header)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise RaggedRows(
                    f"row has {len(row)} fields, expected {width}", line=line_no
                )
            rows.append((line_no, [cell.strip() for cell in row]))
    if response not in header:
        raise ParseError(f"response column {response!r} not found in header")
    if not rows:
        raise ParseError("no data rows", line=1)
    columns = {}
    rejected = {}
    for j, name in enumerate(header):
        values = np.empty(len(rows))
        for i, (line_no, row) in enumerate(rows):
            text = row[j]
            try:
                value = float(text)
            except ValueError:
                value = np.nan
            if not np.isfinite(value):
                rejected[name] = (line_no, j + 1, text)
                break
            values[i] = value
        else:
            columns[name] = values
    if response in rejected:
        line_no, col_no, text = rejected[response]
        raise ParseError(
            f"response column {response!r}: cannot parse {text!r} as a finite number",
            line=line_no,
            column=col_no,
        )
    y = columns[response]
    bad = np.flatnonzero(y <= 0.0)
    if bad.size:
        line_no = rows[int(bad[0])][0]
        raise NonPositiveResponse(
            f"response {response!r} must be positive, "
            f"found {float(y[bad[0]])} on line {line_no}",
            line=line_no,
        )
    return Dataset(columns=columns, n=len(rows), response=response, rejected=rejected)


def _design_from_terms(dataset, terms, label):
    cols = [np.ones(dataset.n)]
    for name in terms:
        if name == dataset.response:
            raise InvalidData(f"{label} term {name!r} is the response column")
        if name in dataset.rejected:
            line_no, col_no, text = dataset.rejected[name]
            raise ParseError(
                f"{label} term {name!r} is not numeric: {text!r}",
                line=line_no,
                column=col_no,
            )
        if name not in dataset.columns:
            raise InvalidData(f"{label} term {name!r} not found in data")
        cols.append(dataset.columns[name])
    return np.column_stack(cols)


def _param_names(mean_terms, prec_terms):
    names = ["beta0"] + [f"beta[{t}]" for t in mean_terms]
    return names + ["nu0"] + [f"nu[{t}]" for t in prec_terms]


@dataclass
class FitReport:
    """Estimates, standard errors and diagnostics for each method."""

    n: int
    response: str
    mean_terms: list
    prec_terms: list
    param_names: list
    methods: dict
    relative_changes: dict
    seed: Optional[int]

    def to_json_dict(self):
        def _finite(v):
            return float(v) if v is not None and np.isfinite(v) else None

        methods = {}
        for name, entry in self.methods.items():
            methods[name] = {
                "estimates": None
                if entry["estimates"] is None
                else [float(v) for v in entry["estimates"]],
                "std_errors": None
                if entry["std_errors"] is None
                else [float(v) for v in entry["std_errors"]],
                "converged": entry["converged"],
                "iterations": entry["iterations"],
                "log_likelihood": _finite(entry["loglik"]),
                "error": entry["error"],
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "fit_report",
            "model": {
                "n": self.n,
                "response": self.response,
                "mean_terms": list(self.mean_terms),
                "prec_terms": list(self.prec_terms),
                "mean_link": "log",
                "prec_link": "log",
                "param_names": list(self.param_names),
            },
            "methods": methods,
            "relative_changes": {
                name: [float(v) for v in values]
                for name, values in self.relative_changes.items()
            },
            "seed": self.seed,
        }

    def to_text(self):
        requested = list(self.methods)
        name_w = max(9, max(len(s) for s in self.param_names) + 2)
        lines = [f'beta prime regression: n={self.n}, response "{self.response}"']
        mean_desc = " + ".join(["intercept"] + list(self.mean_terms))
        prec_desc = " + ".join(["intercept"] + list(self.prec_terms))
        lines.append(f"mean submodel: {mean_desc} (log link)")
        lines.append(f"precision submodel: {prec_desc} (log link)")
        lines.append("")
        lines.append(
            f"{'parameter':<{name_w}s}" + "".join(f"{m:>{_COL}s}" for m in requested)
        )
        for j, pname in enumerate(self.param_names):
            est_row = f"{pname:<{name_w}s}"
            se_row = " " * name_w
            for m in requested:
                entry = self.methods[m]
                if entry["estimates"] is None:
                    est_row += f"{'failed':>{_COL}s}"
                    se_row += " " * _COL
                else:
                    est_row += f"{entry['estimates'][j]:>{_COL}.4f}"
                    se_row += f"{'(' + format(entry['std_errors'][j], '.4f') + ')':>{_COL}s}"
            lines.append(est_row)
            lines.append(se_row)
        lines.append("")
        for m in requested:
            entry = self.methods[m]
            if entry["estimates"] is None:
                lines.append(f"{m}: failed ({entry['error']})")
            else:
                lines.append(
                    f"{m}: converged, {entry['iterations']} iterations, "
                    f"log-likelihood {entry['loglik']:.4f}"
                )
        if self.relative_changes:
            lines.append("")
            lines.append("relative change |mle - corrected| / |corrected| in percent")
            shown = [m for m in requested if m in self.relative_changes]
            lines.append(
                f"{'parameter':<{name_w}s}" + "".join(f"{m:>{_COL}s}" for m in shown)
            )
            for j, pname in enumerate(self.param_names):
                row = f"{pname:<{name_w}s}"
                for m in shown:
                    row += f"{self.relative_changes[m][j]:>{_COL}.4f}"
                lines.append(row)
        return "\n".join(lines) + "\n"


def run_fit(dataset, mean_terms, prec_terms, methods, opts=None):
    """Fit the requested estimators and assemble the comparison report."""
    opts = opts or FitOptions()
    unknown = [m for m in methods if m not in _DRIVERS]
    if unknown:
        raise InvalidData(
            f"unknown method(s) {unknown}; choose from {', '.join(METHOD_ORDER)}"
        )
    if not methods:
        raise InvalidData("no methods requested")
    X = _design_from_terms(dataset, mean_terms, "mean")
    Z = _design_from_terms(dataset, prec_terms, "precision")
    spec = ModelSpec(dataset.columns[dataset.response], X, Z)
    ordered = [m for m in METHOD_ORDER if m in methods]
    entries = {}
    for name in ordered:
        try:
            result = _DRIVERS[name](spec, opts)
        except (
            NonConvergence,
            SingularInformation,
            DomainError,
            ArithmeticError,
        ) as exc:
            entries[name] = {
                "estimates": None,
                "std_errors": None,
                "converged": False,
                "iterations": getattr(exc, "iterations", None),
                "loglik": None,
                "error": str(exc),
            }
            continue
        entries[name] = {
            "estimates": result.theta.theta,
            "std_errors": result.std_errors,
            "converged": result.converged,
            "iterations": result.iterations,
            "loglik": result.loglik,
            "error": None,
        }
    relative_changes = {}
    mle_entry = entries.get("mle")
    if mle_entry is not None and mle_entry["converged"]:
        theta_mle = np.asarray(mle_entry["estimates"])
        for name in ordered:
            entry = entries[name]
            if not entry["converged"]:
                continue
            theta = np.asarray(entry["estimates"])
            with np.errstate(divide="ignore", invalid="ignore"):
                relative_changes[name] = (
                    np.abs(theta_mle - theta) / np.abs(theta) * 100.0
                )
    return FitReport(
        n=dataset.n,
        response=dataset.response,
        mean_terms=list(mean_terms),
        prec_terms=list(prec_terms),
        param_names=_param_names(mean_terms, prec_terms),
        methods=entries,
        relative_changes=relative_changes,
        seed=opts.seed,
    )


def _parse_terms(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bpreg",
        description="beta prime regression with mean and precision submodels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit_p = sub.add_parser("fit", help="fit a model to a CSV dataset")
    fit_p.add_argument("--data", required=True, help="CSV file with a header row")
    fit_p.add_argument("--response", required=True, help="response column name")
    fit_p.add_argument(
        "--mean", default="", help="comma separated mean covariate columns"
    )
    fit_p.add_argument(
        "--prec", default="", help="comma separated precision covariate columns"
    )
    fit_p.add_argument(
        "--methods",
        default="mle,cox_snell,firth,boot",
        help="comma separated subset of mle,cox_snell,firth,boot",
    )
    fit_p.add_argument(
        "--boot-reps", type=int, default=500, help="bootstrap replications"
    )
    fit_p.add_argument("--seed", type=int, default=None, help="bootstrap seed")
    fit_p.add_argument("--out", default=None, help="also write a JSON report here")

    sim_p = sub.add_parser("simulate", help="run the Monte Carlo bias study")
    sim_p.add_argument("--n", type=int, required=True, help="sample size")
    sim_p.add_argument("--p", type=int, default=1, help="mean covariates")
    sim_p.add_argument("--q", type=int, default=1, help="precision covariates")
    sim_p.add_argument("--m", type=int, default=2000, help="replicates")
    sim_p.add_argument("--seed", type=int, default=None, help="study seed")
    sim_p.add_argument(
        "--out",
        required=True,
        help="directory for report.json, report.txt and replicates.csv",
    )
    sim_p.add_argument(
        "--full",
        action="store_true",
        help="run the full 10000 replicate study (overrides --m)",
    )
    return parser


def simulate_config(args):
    """Build the study configuration from parsed arguments."""
    m = 10000 if args.full else args.m
    return mc.McConfig(n=args.n, p=args.p, q=args.q, m=m, seed=args.seed)


def _fit_command(args):
    try:
        opts = FitOptions(bootstrap_reps=args.boot_reps, seed=args.seed)
        dataset = load_csv(args.data, args.response)
        report = run_fit(
            dataset,
            _parse_terms(args.mean),
            _parse_terms(args.prec),
            _parse_terms(args.methods),
            opts,
        )
    except (ParseError, NonPositiveResponse, InvalidData, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_text())
    if args.out:
        with open(args.out, "w") as handle:
            json.dump(report.to_json_dict(), handle, sort_keys=True, indent=2)
            handle.write("\n")
    failed = [m for m, entry in report.methods.items() if not entry["converged"]]
    for name in failed:
        print(f"method {name} failed: {report.methods[name]['error']}", file=sys.stderr)
    return 1 if failed else 0


def _simulate_command(args):
    try:
        cfg = simulate_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        samples = mc.simulate_replicates(cfg)
    except ExcessiveFailures as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = mc.summarize(samples)
    os.makedirs(args.out, exist_ok=True)
    mc.report_to_json(report, os.path.join(args.out, "report.json"))
    text = report.to_text()
    with open(os.path.join(args.out, "report.txt"), "w") as handle:
        handle.write(text)
    mc.export_replicates(cfg, os.path.join(args.out, "replicates.csv"), samples=samples)
    sys.stdout.write(text)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "fit":
        return _fit_command(args)
    return _simulate_command(args)


if __name__ == "__main__":
    sys.exit(main())
