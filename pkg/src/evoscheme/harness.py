"""Benchmark functions, replicated runs and the tuning studies built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .core import EvoSchemeError, Objective, RunTrace, SearchSpace
from .engine import GaConfig, run_ga
from .hybrid import HybridConfig, run_hybrid

QUALITY_THRESHOLD = 0.99


# ---------------------------------------------------------------------------
# Benchmark functions (maximization sense, optimum 0)
# ---------------------------------------------------------------------------

def sphere(x):
    x = np.asarray(x, dtype=float)
    return -np.sum(x**2, axis=-1)


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return -np.sum(x**2 + 10.0 * (1.0 - np.cos(2 * np.pi * x)), axis=-1)


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return -np.sum(100.0 * (x[..., 1:] - x[..., :-1] ** 2) ** 2 + (1.0 - x[..., :-1]) ** 2, axis=-1)


def ackley(x):
    # grouped so each bracket is exactly zero at the origin
    x = np.asarray(x, dtype=float)
    r = np.sqrt(np.mean(x**2, axis=-1))
    c = np.mean(np.cos(2 * np.pi * x), axis=-1)
    return (20.0 * np.exp(-0.2 * r) - 20.0) + (np.exp(c) - np.e)


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    n: int
    space: SearchSpace
    fn: Callable
    f_opt: float
    x_opt: np.ndarray

    def __call__(self, x):
        return self.fn(x)

    def objective(self, workers: int = 1) -> Objective:
        return Objective(self.fn, self.n, vectorized=True, workers=workers,
                         f_opt=self.f_opt, x_opt=self.x_opt, name=self.name)


_DEFINITIONS = {
    "sphere": (sphere, 5.12, 0.0),
    "rastrigin": (rastrigin, 5.12, 0.0),
    "rosenbrock": (rosenbrock, 2.048, 1.0),
    "ackley": (ackley, 32.768, 0.0),
}

BENCHMARK_NAMES = tuple(_DEFINITIONS)


def get_benchmark(name: str, n: int) -> BenchmarkFunction:
    try:
        fn, half_width, opt_coord = _DEFINITIONS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {BENCHMARK_NAMES}") from None
    if name == "rosenbrock" and n < 2:
        raise ValueError("rosenbrock needs n >= 2")
    return BenchmarkFunction(name, n, SearchSpace.uniform(n, -half_width, half_width),
                             fn, 0.0, np.full(n, opt_coord))


def builtin_functions(n: int = 2) -> list[BenchmarkFunction]:
    return [get_benchmark(name, n) for name in BENCHMARK_NAMES]


# ---------------------------------------------------------------------------
# Replicated runs
# ---------------------------------------------------------------------------

def _run_once(fn: BenchmarkFunction, config: GaConfig, seed: int,
              hybrid: Optional[HybridConfig], workers: int) -> RunTrace:
    obj = fn.objective(workers)
    cfg = config.with_seed(seed)
    if hybrid is None:
        return run_ga(obj, fn.space, cfg)
    return run_hybrid(obj, fn.space, cfg, hybrid)


@dataclass(frozen=True)
class RunSummary:
    seed: int
    best_fitness: float
    baseline: float
    evaluations: int
    generations: int


@dataclass
class ReplicateSummary:
    runs: list[RunSummary]
    mean: float
    std: float
    min: float
    max: float
    mean_evaluations: float

    @property
    def best_values(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.runs])

    def to_dict(self) -> dict:
        return {
            "runs": [vars(r) for r in self.runs],
            "mean": self.mean, "std": self.std, "min": self.min, "max": self.max,
            "mean_evaluations": self.mean_evaluations,
        }


def run_replicates(fn: BenchmarkFunction, config: GaConfig, R: int = 30, base_seed: int = 0, *,
                   hybrid: Optional[HybridConfig] = None, seeds: Optional[Sequence[int]] = None,
                   workers: int = 1) -> ReplicateSummary:
    """``R`` independent runs seeded ``base_seed .. base_seed + R - 1``
    (or the explicit ``seeds``); std uses divisor R."""
    if seeds is None:
        if R < 1:
            raise ValueError("R must be >= 1")
        seeds = range(base_seed, base_seed + R)
    runs = []
    for seed in seeds:
        trace = _run_once(fn, config, seed, hybrid, workers)
        runs.append(RunSummary(seed, trace.best.fitness, trace.initial_mean, trace.evaluations, trace.generations))
    best = np.array([r.best_fitness for r in runs])
    mean, std = (best[0], 0.0) if best.min() == best.max() else (best.mean(), best.std())
    return ReplicateSummary(runs, float(mean), float(std), float(best.min()), float(best.max()),
                            float(np.mean([r.evaluations for r in runs])))


# ---------------------------------------------------------------------------
# 99% quality rule
# ---------------------------------------------------------------------------

def quality_ratio(f_best: float, f_base: float, f_opt: float) -> float:
    """Fraction of the gap between the baseline and the optimum that was closed, clipped to [0, 1]."""
    if f_opt == f_base:
        return 1.0
    return float(np.clip((f_best - f_base) / (f_opt - f_base), 0.0, 1.0))


@dataclass
class QualityReport:
    function: str
    runs: list[RunSummary]
    qualities: list[float]
    threshold: float = QUALITY_THRESHOLD

    @property
    def R(self) -> int:
        return len(self.runs)

    @property
    def mean_quality(self) -> float:
        return float(np.mean(self.qualities))

    @property
    def passed(self) -> bool:
        return self.mean_quality >= self.threshold

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "runs": [dict(vars(r), quality=q) for r, q in zip(self.runs, self.qualities)],
            "mean_quality": self.mean_quality,
            "threshold": self.threshold,
            "passed": self.passed,
        }


class BenchmarkMetadataError(EvoSchemeError):
    """A run beat the declared optimum, so the benchmark's ``f_opt`` is wrong."""


def quality_report(name: str, runs: Sequence[RunSummary], f_opt: float,
                   threshold: float = QUALITY_THRESHOLD) -> QualityReport:
    slack = 1e-12 * (1.0 + abs(f_opt))
    for r in runs:
        if r.best_fitness > f_opt + slack:
            raise BenchmarkMetadataError(
                f"{name}: run with seed {r.seed} reached {r.best_fitness} above the declared optimum {f_opt}")
    qualities = [quality_ratio(r.best_fitness, r.baseline, f_opt) for r in runs]
    return QualityReport(name, list(runs), qualities, threshold)


def collet_quality(fn: BenchmarkFunction, config: GaConfig, R: int = 30, base_seed: int = 0, *,
                   hybrid: Optional[HybridConfig] = None, workers: int = 1) -> QualityReport:
    """Replicated runs scored against the known optimum.

    Each run's quality is the fraction of the gap between its initial
    population's mean fitness and ``f_opt`` that its best solution closed.
    The report passes when the mean quality reaches 0.99.
    """
    summary = run_replicates(fn, config, R, base_seed, hybrid=hybrid, workers=workers)
    return quality_report(fn.name, summary.runs, fn.f_opt)


# ---------------------------------------------------------------------------
# Population-size study
# ---------------------------------------------------------------------------

@dataclass
class TuningReport:
    pop_sizes: tuple[int, int, int]
    max_generations: int
    results: dict = field(default_factory=dict)
    recommendation: str = "keep"

    def to_dict(self) -> dict:
        return {
            "max_generations": self.max_generations,
            "variants": [
                {"pop_size": n, "mean_best": s.mean, "std_best": s.std,
                 "mean_evaluations": s.mean_evaluations, "replicates": len(s.runs)}
                for n, s in ((n, self.results[n]) for n in self.pop_sizes)
            ],
            "recommendation": self.recommendation,
        }


def recommend(base: ReplicateSummary, doubled: ReplicateSummary) -> str:
    """``increase`` when doubling the population beats the current size by
    more than one pooled standard error of the difference in means."""
    R1, R2 = len(base.runs), len(doubled.runs)
    s1 = np.std(base.best_values, ddof=1) if R1 > 1 else 0.0
    s2 = np.std(doubled.best_values, ddof=1) if R2 > 1 else 0.0
    se = math.sqrt(s1**2 / R1 + s2**2 / R2)
    return "increase" if doubled.mean - base.mean > se else "keep"


def population_size_study(fn: BenchmarkFunction, config: GaConfig, replicates: int = 30, base_seed: int = 0, *,
                          hybrid: Optional[HybridConfig] = None, workers: int = 1) -> TuningReport:
    """Rerun with ``N/2``, ``N`` and ``2N`` individuals under the same
    generation budget and recommend whether to grow the population."""
    n_pop = config.pop_size
    if n_pop < 4:
        raise ValueError("population size must be >= 4 so that N/2 >= 2")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    sizes = (n_pop // 2, n_pop, 2 * n_pop)
    results = {}
    for size in sizes:
        cfg = replace(config, pop_size=size, elitism_k=min(config.elitism_k, size - 1))
        results[size] = run_replicates(fn, cfg, replicates, base_seed, hybrid=hybrid, workers=workers)
    return TuningReport(sizes, config.max_generations, results, recommend(results[n_pop], results[2 * n_pop]))
