"""Command-line entry point.

Usage::

    evoscheme run       --config cfg.json [--seed S] [--out DIR] [--workers W]
    evoscheme hybrid    --config cfg.json ...
    evoscheme landscape --config cfg.json [--lhs N] [--slice i=0 j=1 r=50] [--scan]
    evoscheme bench     --config cfg.json [--fn sphere] [--runs R]
    evoscheme tune      --config cfg.json [--fn sphere] [--runs R]

Exit codes: 0 on success, 1 on configuration errors, 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import RunConfig, load_config, parse_config, resolve
from .core import ConfigError, RngStream
from .engine import run_ga
from .external import ExternalProcess
from .harness import BENCHMARK_NAMES, collet_quality, population_size_study
from .hybrid import HybridConfig, run_hybrid
from .landscape import evaluate_design, ga_scan, lhs_sample, separability_probe, slice_grid

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

# landscape sampling streams, spawned off the run seed
_LHS_STREAM, _PROBE_STREAM = 2, 3


def _parse_slice(tokens):
    spec = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("i", "j", "r"):
            raise ConfigError(f"expected i=<int> j=<int> r=<int>, got {tok!r}", "--slice")
        try:
            spec[key] = int(value)
        except ValueError:
            raise ConfigError(f"{key} must be an integer", "--slice") from None
    if not {"i", "j"} <= set(spec):
        raise ConfigError("needs both i and j", "--slice")
    return spec


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="overrides the configuration seed")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument("--workers", type=int, default=1, help="threads for fitness evaluation")

    parser = argparse.ArgumentParser(prog="evoscheme", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="plain GA run")
    sub.add_parser("hybrid", parents=[common], help="GA with local search")
    land = sub.add_parser("landscape", parents=[common], help="landscape sampling and probes")
    land.add_argument("--lhs", type=int, metavar="N", help="Latin hypercube sample size")
    land.add_argument("--slice", nargs="+", metavar="K=V", help="two-variable slice, e.g. i=0 j=1 r=50")
    land.add_argument("--scan", action="store_true", help="also export the GA's final distinct solutions")
    for name, help_text in (("bench", "99%% quality rule over replicated runs"),
                            ("tune", "population-size study at N/2, N, 2N")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--fn", choices=BENCHMARK_NAMES, help="builtin benchmark (overrides problem)")
        p.add_argument("--runs", type=int, help="replicated runs per variant")
        p.add_argument("--hybrid", action="store_true", help="use the hybrid optimizer")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config, args.seed)
    if getattr(args, "fn", None):
        doc = resolve(cfg)
        doc["problem"] = args.fn
        doc.pop("space")
        cfg = parse_config(doc, cfg.seed)
    if args.out:
        cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
    if args.workers < 1:
        raise ConfigError("must be >= 1", "--workers")
    if getattr(args, "runs", None) is not None and args.runs < 1:
        raise ConfigError("must be >= 1", "--runs")
    return cfg


@contextlib.contextmanager
def _problem(cfg: RunConfig):
    if cfg.problem.command is None:
        yield cfg.benchmark()
        return
    with ExternalProcess(cfg.problem.command) as proc:
        yield cfg.benchmark(proc)


def _write_run(trace, cfg: RunConfig, out: Path):
    if "csv" in cfg.output.formats:
        io.write_trace_csv(trace, out / "trace.csv")
    if "json" in cfg.output.formats:
        io.write_json(io.best_solution_dict(trace), out / "best.json")


def cmd_run(args, cfg: RunConfig, out: Path):
    with _problem(cfg) as fn:
        obj = fn.objective(args.workers)
        if args.command == "hybrid":
            trace = run_hybrid(obj, cfg.space, cfg.ga, cfg.hybrid or HybridConfig())
        else:
            trace = run_ga(obj, cfg.space, cfg.ga)
    _write_run(trace, cfg, out)
    print(f"best fitness {trace.best.fitness!r} after {trace.generations} generations, "
          f"{trace.evaluations} evaluations ({trace.stop_reason})")


def cmd_landscape(args, cfg: RunConfig, out: Path):
    land = cfg.landscape
    rng = RngStream(cfg.seed)
    slice_spec = _parse_slice(args.slice) if args.slice else None
    if slice_spec is None and land.slice_i is not None and land.slice_j is not None:
        slice_spec = {"i": land.slice_i, "j": land.slice_j}
    with _problem(cfg) as fn:
        obj = fn.objective(args.workers)
        design = evaluate_design(obj, lhs_sample(cfg.space, args.lhs or land.lhs_samples, rng.spawn(_LHS_STREAM)))
        io.write_lhs_csv(design, out / "lhs.csv")
        if slice_spec is not None:
            base = np.array(land.base) if land.base is not None else (cfg.space.lower + cfg.space.upper) / 2
            r = slice_spec.get("r", land.slice_resolution)
            grid = slice_grid(obj, cfg.space, base, slice_spec["i"], slice_spec["j"], r)
            io.write_slice_csv(grid, out / "slice.csv")
        report = separability_probe(obj, cfg.space, land.probe_trials, land.probe_tol, rng.spawn(_PROBE_STREAM))
        io.write_json({
            "separable": report.separable,
            "tolerance": report.tolerance,
            "pairs": [{"i": i, "j": j, "residual": res, "separable": report.pairs[(i, j)]}
                      for (i, j), res in report.residuals.items()],
        }, out / "separability.json")
        if args.scan or land.scan:
            solutions = ga_scan(obj, cfg.space, cfg.ga, land.dedup_radius)
            io.write_json([{"phenotype": s.phenotype, "fitness": s.fitness} for s in solutions],
                          out / "scan.json")
    verdict = "separable" if report.separable else "not separable"
    print(f"{len(design)} LHS samples; probe verdict: {verdict} (max residual {report.max_residual:.3g})")


def cmd_bench(args, cfg: RunConfig, out: Path):
    runs = args.runs or cfg.harness.runs
    hybrid = cfg.hybrid or (HybridConfig() if args.hybrid else None)
    with _problem(cfg) as fn:
        if fn.f_opt is None:
            raise ConfigError("bench needs a known optimum", "problem.f_opt")
        report = collet_quality(fn, cfg.ga, runs, cfg.seed, hybrid=hybrid, workers=args.workers)
    io.write_json(report.to_dict(), out / "quality.json")
    print(f"mean quality {report.mean_quality:.6f} over {report.R} runs: {'pass' if report.passed else 'fail'}")


def cmd_tune(args, cfg: RunConfig, out: Path):
    replicates = args.runs or cfg.harness.replicates
    hybrid = cfg.hybrid or (HybridConfig() if args.hybrid else None)
    with _problem(cfg) as fn:
        report = population_size_study(fn, cfg.ga, replicates, cfg.seed, hybrid=hybrid, workers=args.workers)
    io.write_json(report.to_dict(), out / "tuning.json")
    print(f"population sizes {report.pop_sizes}: recommendation {report.recommendation}")


COMMANDS = {"run": cmd_run, "hybrid": cmd_run, "landscape": cmd_landscape, "bench": cmd_bench, "tune": cmd_tune}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors are configuration errors; --help exits cleanly
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out = Path(cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(resolve(cfg), out / "config.resolved.json")
        COMMANDS[args.command](args, cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - every failure maps onto the runtime exit code
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
