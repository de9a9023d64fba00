# MIT License
# 
# Copyright (c) 2026 pysgdct contributors
# 
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
Command line interface. Every command prints `name=value` lines (or CSV) on stdout and
exits with 0 on success, 1 if a run diverged or a check failed and 2 on usage errors.
"""

__all__ = ["main", "build_parser", "run_checks"]

from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence
import argparse
import csv
import logging
import sys
import numpy as np
from pysgdct.config import ExperimentConfig, config_hash, load_config
from pysgdct.enums import ExitCode, RunStatus
from pysgdct.errors import SgdctError, UsageError
from pysgdct.estimators import EstimatorState
from pysgdct.experiment import SweepRow, run_experiment, summarize, sweep
from pysgdct.model import ModelSpec
from pysgdct.oracle import (
    OracleReport,
    QuadraticTruth,
    discrete_stationary_moments_quadratic,
    fd_tangent_check,
    finite_n_objective_quadratic,
    pseudo_targets,
    rao_blackwell_check,
    stationary_moments_quadratic
)
from pysgdct.output import write_summary_csv, write_trace_csv
from pysgdct.presets import replicate_figure
from pysgdct.utils import parse_values

logger = logging.getLogger(__name__)

CHECK_THETAS = {
    "quadratic": (1.2, 0.5),
    "kuramoto": (1.5,),
    "fitzhugh-nagumo": (0.9, 0.4, 0.1, 1.0)
}
TANGENT_TOLERANCE = 1e-3
RAO_BLACKWELL_TOLERANCE = 1e-12


def _print(name : str, value) -> None:
    print(f"{name}={value!r}" if isinstance(value, float) else f"{name}={value}")


def _print_rows(rows : Sequence[SweepRow]) -> None:
    writer = csv.writer(sys.stdout, lineterminator = "\n")
    writer.writerow(SweepRow.header(rows[0].error.shape[0]))
    writer.writerows(x.as_row() for x in rows)


def command_estimate(args : argparse.Namespace) -> ExitCode:
    config = load_config(args.config)
    if args.seed is not None:
        config = ExperimentConfig.from_dict({**config.to_dict(), "seeds": [args.seed]})
    out = Path(args.out or config.output or ".")
    traces = run_experiment(config, concurrency = args.concurrency)
    _print("config_hash", config_hash(config))
    for trace in traces:
        path = out / f"trace_seed{trace.seed}.csv"
        write_trace_csv(trace, path)
        _print(f"seed{trace.seed}.status", trace.status.name)
        _print(f"seed{trace.seed}.trace", str(path))
        for variant in trace.variants:
            for index, value in enumerate(trace.final(variant)):
                _print(f"seed{trace.seed}.{variant.column_prefix}_{index + 1}", float(value))
    write_summary_csv(summarize(config, traces), out / "summary.csv", {"config_hash": config_hash(config)})
    diverged = any(x.status is RunStatus.DIVERGED for x in traces)
    return ExitCode.DIVERGED if diverged else ExitCode.OK


def command_sweep(args : argparse.Namespace) -> ExitCode:
    config = load_config(args.config)
    try:
        values = parse_values(args.values)
    except ValueError as exc:
        raise UsageError(f"--values: {exc}") from None
    rows = sweep(config, args.axis, values, concurrency = args.concurrency)
    if args.out:
        path = Path(args.out) / "summary.csv"
        write_summary_csv(rows, path, {"config_hash": config_hash(config), "axis": args.axis})
        _print("summary", str(path))
    else:
        _print_rows(rows)
    return ExitCode.DIVERGED if any(x.diverged for x in rows) else ExitCode.OK


def command_oracle(args : argparse.Namespace) -> ExitCode:
    truth = QuadraticTruth(args.theta01, args.theta02, args.sigma)
    alpha_star, theta1_star, theta2_star = pseudo_targets(truth, args.n)
    variance, covariance = stationary_moments_quadratic(truth, args.n)
    _print("alpha0", truth.alpha0)
    _print("alpha_star", alpha_star)
    _print("theta1_star", theta1_star)
    _print("theta2_star", theta2_star)
    _print("objective_floor", finite_n_objective_quadratic((alpha_star, 0.0), truth, args.n))
    _print("V_N", variance)
    _print("C_N", covariance)
    if args.dt is not None:
        variance, covariance = discrete_stationary_moments_quadratic(truth, args.n, args.dt)
        _print("V_N_euler", variance)
        _print("C_N_euler", covariance)
    return ExitCode.OK


def run_checks(seed : int = 0) -> List[OracleReport]:
    """
    The tangent and Rao-Blackwell self-checks of every registered model.
    """
    reports = []
    generator = np.random.default_rng(seed)
    for name in ModelSpec.names():
        model = ModelSpec.get(name)
        theta = CHECK_THETAS.get(name, (1.0,) * model.p)
        reports.append(fd_tangent_check(model, theta, M = 3, dt = 0.05, steps = 200, epsilon = 1e-5, seed = seed))
        state = EstimatorState.initial(model, theta, 20, seed)
        state.hat_tangent = generator.standard_normal(state.hat_tangent.shape)
        x_obs = model.wrap(generator.standard_normal(model.d))
        dx_obs = 0.1 * generator.standard_normal(model.d)
        reports.append(rao_blackwell_check(model, state, x_obs, dx_obs, 0.1))
    return reports


def command_check(args : argparse.Namespace) -> ExitCode:
    passed = True
    for report in run_checks(args.seed):
        tolerance = TANGENT_TOLERANCE if report.name.startswith("fd_tangent") else RAO_BLACKWELL_TOLERANCE
        ok = report.passed(tolerance)
        passed = passed and ok
        print(report.lines())
        _print(f"{report.name}.passed", ok)
    return ExitCode.OK if passed else ExitCode.DIVERGED


def command_replicate(args : argparse.Namespace) -> ExitCode:
    results = replicate_figure(args.figure, args.out, scale = args.scale, concurrency = args.concurrency)
    for result in results:
        _print(f"{result.figure}.directory", str(result.directory))
        _print(f"{result.figure}.diverged", result.diverged)
        for row in result.rows:
            prefix = f"{result.figure}.{row.variant.value}" + (f".{row.axis}{row.value}" if row.axis else "")
            for index, value in enumerate(row.error):
                _print(f"{prefix}.l2_{index + 1}", float(value))
    return ExitCode.DIVERGED if any(x.diverged for x in results) else ExitCode.OK


COMMANDS : Dict[str, Callable[[argparse.Namespace], ExitCode]] = {
    "estimate": command_estimate,
    "sweep": command_sweep,
    "oracle": command_oracle,
    "check": command_check,
    "replicate": command_replicate
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog = "pysgdct", description = "Online virtual-particle SGDCT estimators.")
    parser.add_argument("-v", "--verbose", action = "count", default = 0, help = "-v for info, -vv for debug logs")
    commands = parser.add_subparsers(dest = "command", required = True)

    estimate = commands.add_parser("estimate", help = "run every seed of a configuration")
    estimate.add_argument("--config", required = True)
    estimate.add_argument("--seed", type = int, help = "run only this seed")
    estimate.add_argument("--out", help = "output directory")

    sweep_ = commands.add_parser("sweep", help = "L2 error against N or M")
    sweep_.add_argument("--config", required = True)
    sweep_.add_argument("--axis", required = True, choices = ["N", "M"])
    sweep_.add_argument("--values", required = True, help = "comma separated, like 5,10,20")
    sweep_.add_argument("--out", help = "write summary.csv here instead of stdout")

    oracle = commands.add_parser("oracle", help = "closed-form quantities of the quadratic model")
    oracle.add_argument("--model", default = "quadratic", choices = ["quadratic"])
    oracle.add_argument("--theta01", type = float, required = True)
    oracle.add_argument("--theta02", type = float, required = True)
    oracle.add_argument("--sigma", type = float, default = 1.0)
    oracle.add_argument("--n", type = int, required = True)
    oracle.add_argument("--dt", type = float, help = "also print the moments of the Euler chain")

    check = commands.add_parser("check", help = "tangent and Rao-Blackwell self-checks")
    check.add_argument("--seed", type = int, default = 0)

    replicate = commands.add_parser("replicate", help = "run figure presets")
    replicate.add_argument("--figure", required = True, help = "preset id or wildcard, like fig2*")
    replicate.add_argument("--scale", type = float, default = 1.0)
    replicate.add_argument("--out", required = True)

    for sub in (estimate, sweep_, replicate):
        sub.add_argument("--concurrency", type = int, help = "maximum number of concurrent runs")
    return parser


def main(argv : Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level = level, format = "%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return int(COMMANDS[args.command](args))
    except SgdctError as exc:
        print(exc.text, file = sys.stderr)
        return int(ExitCode.USAGE if exc.status is RunStatus.INVALID_ARGUMENT else ExitCode.DIVERGED)
