#!/usr/bin/env python
"""
Main Application Entry Point for graphtest

Command-line harness for the graph two-sample tests:

    python main.py test X1.csv X2.csv --test fr-smooth --lambda 1
    python main.py power --dims 2 5 10 --output-dir results
    python main.py diagnostics --lambdas 10 1 0.05
    python main.py learn --steps 500

Reports go to stdout (JSON) or to ``--output-dir`` (CSV/SVG); logs go to stderr.
"""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.config import Settings
from src.exceptions import DataFileError, GraphTestError, InvalidInputError, NumericalError, ParameterError
from src.experiments import (
    AdamConfig,
    DiagnosticsConfig,
    LearnConfig,
    PowerConfig,
    learn_toy,
    mean_t_statistic,
    null_diagnostics,
    power_experiment,
    save_line_svg,
    save_power_svg,
    save_scatter_svg,
    two_moons,
)
from src.geometry import load_points_csv, pool_samples, write_points_csv
from src.log_format import configure_logging
from src.orchestrator import ExperimentOrchestrator
from src.test_management import TestKind, TestOptions, TestReport

logger = logging.getLogger("graphtest")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

CLI_TESTS = [kind.value for kind in TestKind]
SMOOTHED_TESTS = [TestKind.FR_SMOOTH.value, TestKind.KNN_SMOOTH.value]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphtest", description="Smoothed graph two-sample tests")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--workers", type=int, default=None, help="worker threads (default: settings)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    test = subparsers.add_parser("test", help="run one test on two CSV point files")
    test.add_argument("file1", type=Path)
    test.add_argument("file2", type=Path)
    test.add_argument("--test", choices=CLI_TESTS, default=TestKind.FR_SMOOTH.value)
    test.add_argument("--k", type=int, default=3)
    scale = test.add_mutually_exclusive_group()
    scale.add_argument("--lambda", dest="lam", type=float, default=None)
    scale.add_argument("--gamma", type=float, default=None, help="lambda (or MMD bandwidth) = d^gamma")
    test.add_argument("--bandwidth", type=float, default=None)
    test.add_argument("--permutations", type=int, default=None)
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--alpha", type=float, default=0.05)

    power = subparsers.add_parser("power", help="power as a function of dimension and gamma")
    power.add_argument("--dims", type=int, nargs="+", default=[2, 5, 10, 20])
    power.add_argument("--n", type=int, default=128)
    power.add_argument("--trials", type=int, default=200)
    power.add_argument("--alpha", type=float, default=0.05)
    power.add_argument("--mu-shift", type=float, default=0.0)
    power.add_argument("--sigma-scale", type=float, default=1.0)
    power.add_argument("--gammas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    power.add_argument("--k", type=int, default=3)
    power.add_argument("--tests", choices=CLI_TESTS, nargs="+",
                       default=["fr", "fr-smooth", "knn", "knn-smooth", "mmd", "mmd-median"])
    power.add_argument("--permutations", type=int, default=None)
    power.add_argument("--seed", type=int, default=0)
    power.add_argument("--output-dir", type=Path, default=None)

    diagnostics = subparsers.add_parser("diagnostics", help="normality of the smoothed permutation null")
    diagnostics.add_argument("--n", type=int, default=256)
    diagnostics.add_argument("--lambdas", type=float, nargs="+", default=[10.0, 1.0, 0.05])
    diagnostics.add_argument("--test", choices=SMOOTHED_TESTS, default=TestKind.FR_SMOOTH.value)
    diagnostics.add_argument("--k", type=int, default=3)
    diagnostics.add_argument("--alternative-noise", type=float, default=0.05)
    diagnostics.add_argument("--replicates", type=int, default=20)
    diagnostics.add_argument("--permutations", type=int, default=None)
    diagnostics.add_argument("--seed", type=int, default=0)
    diagnostics.add_argument("--output-dir", type=Path, default=None)

    learn = subparsers.add_parser("learn", help="fit a generator to two moons")
    learn.add_argument("--test", choices=SMOOTHED_TESTS, default=TestKind.FR_SMOOTH.value)
    learn.add_argument("--lambda", dest="lam", type=float, default=1.0)
    learn.add_argument("--k", type=int, default=3)
    learn.add_argument("--batch", type=int, default=256)
    learn.add_argument("--steps", type=int, default=500)
    learn.add_argument("--lr", type=float, default=1e-4)
    learn.add_argument("--architecture", choices=["affine", "tanh"], default="affine")
    learn.add_argument("--width", type=int, default=32)
    learn.add_argument("--eval-batches", type=int, default=20)
    learn.add_argument("--seed", type=int, default=0)
    learn.add_argument("--output-dir", type=Path, default=None)
    return parser


async def run_test(args: argparse.Namespace, settings: Settings) -> TestReport:
    """Load both files, run the selected test and return its report."""
    data = pool_samples(load_points_csv(args.file1), load_points_csv(args.file2))
    options = TestOptions(
        kind=TestKind(args.test),
        k=args.k,
        lam=args.lam,
        gamma=args.gamma,
        bandwidth=args.bandwidth,
        permutations=args.permutations or settings.permutations,
        seed=args.seed,
        alpha=args.alpha,
    )
    async with ExperimentOrchestrator(settings, name="TestRunner") as orchestrator:
        return await orchestrator.run_test(data, options)


def run_power(args: argparse.Namespace, settings: Settings) -> Path:
    cfg = PowerConfig(
        dims=args.dims, n=args.n, trials=args.trials, alpha_level=args.alpha, mu_shift=args.mu_shift,
        sigma_scale=args.sigma_scale, gammas=args.gammas, k=args.k, tests=args.tests,
        permutations=args.permutations or settings.permutations, seed=args.seed,
    )
    table = power_experiment(cfg, settings)
    output_dir = args.output_dir or settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    table.to_csv(output_dir / "power.csv", index=False)
    save_power_svg(output_dir / "power.svg", table)
    return output_dir


def run_diagnostics(args: argparse.Namespace, settings: Settings) -> Path:
    cfg = DiagnosticsConfig(
        n=args.n, lambdas=args.lambdas, test=args.test, k=args.k, alternative_noise=args.alternative_noise,
        replicates=args.replicates, permutations=args.permutations or settings.permutations, seed=args.seed,
    )
    summary, pairs = null_diagnostics(cfg, settings)
    output_dir = args.output_dir or settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    summary.to_csv(output_dir / "diagnostics_summary.csv", index=False)
    pairs.to_csv(output_dir / "diagnostics_pairs.csv", index=False)
    return output_dir


def run_learn(args: argparse.Namespace, settings: Settings) -> Path:
    cfg = LearnConfig(
        test=args.test, lam=args.lam, k=args.k, batch=args.batch, steps=args.steps,
        adam=AdamConfig(lr=args.lr), architecture=args.architecture, width=args.width, seed=args.seed,
    )
    result = learn_toy(cfg)
    output_dir = args.output_dir or settings.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    write_points_csv(result.samples, output_dir / "samples.csv")
    result.loss_trace.to_csv(output_dir / "loss.csv", index=False)
    (output_dir / "generator.json").write_text(result.params.model_dump_json(indent=2) + "\n")
    if args.eval_batches > 0:
        evaluation = {
            "initial_mean_t": mean_t_statistic(result.initial, cfg, args.eval_batches, seed=args.seed),
            "final_mean_t": mean_t_statistic(result.params, cfg, args.eval_batches, seed=args.seed),
        }
        (output_dir / "evaluation.json").write_text(json.dumps(evaluation, indent=2) + "\n")
    real = load_reference_moons(cfg)
    save_scatter_svg(output_dir / "scatter.svg", real, result.samples, title=f"{cfg.test.value}, lambda={cfg.lam:g}")
    trace = result.loss_trace
    save_line_svg(output_dir / "loss.svg", trace["step"].tolist(), {"loss": trace["loss"].tolist()},
                  xlabel="step", ylabel="-t")
    return output_dir


def load_reference_moons(cfg: LearnConfig) -> np.ndarray:
    """Data sample drawn alongside the final generated sample, for the scatter plot."""
    return two_moons(cfg.batch, cfg.noise, np.random.default_rng([cfg.seed, 2, 1])).points


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = Settings.from_env()
        if args.workers is not None:
            settings = settings.model_copy(update={"workers": max(1, args.workers)})
    except ValueError as exc:
        print(f"graphtest: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging("DEBUG" if args.verbose else settings.log_level)

    try:
        if args.command == "test":
            report = asyncio.run(run_test(args, settings))
            print(report.to_json())
        elif args.command == "power":
            logger.info(f"Wrote power table to {run_power(args, settings)}")
        elif args.command == "diagnostics":
            logger.info(f"Wrote diagnostics to {run_diagnostics(args, settings)}")
        elif args.command == "learn":
            logger.info(f"Wrote learning outputs to {run_learn(args, settings)}")
    except NumericalError as exc:
        logger.error(f"Numerical failure: {exc}")
        print(f"graphtest: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataFileError, InvalidInputError, ParameterError) as exc:
        logger.error(str(exc))
        print(f"graphtest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # pydantic validation of options and configs
        logger.error(f"Invalid options: {exc}")
        print(f"graphtest: invalid options: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphTestError as exc:
        logger.error(str(exc))
        print(f"graphtest: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
