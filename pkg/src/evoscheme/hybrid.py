"""Memetic coordination: GA plus local search.

Two local searchers are provided, simulated annealing and a deterministic
coordinate pattern search. Their results are written back into the
population either Lamarckian style (the improved point replaces the
individual) or Baldwinian style (only the fitness is raised).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    ConfigError,
    Individual,
    Objective,
    Population,
    RngStream,
    RunTrace,
    SearchSpace,
    clamp_to_bounds,
)
from .engine import GaConfig, run_ga
from .operators import BinaryCodec

MODES = ("lamarckian", "baldwinian", "mixed")
SEARCHERS = ("sa", "hill_climb")
PLACEMENTS = ("post", "interleaved")

# stream keys spawned off the run seed; the GA itself uses the root stream
_HYBRID_STREAM = 1


@dataclass(frozen=True)
class SaSchedule:
    """Simulated annealing parameters.

    The temperature starts at ``T0`` and is multiplied by ``beta`` after every
    ``steps_per_temperature`` proposals. Proposals perturb every coordinate by
    ``sigma_rel * range_i * N(0, 1)``.
    """

    T0: float = 1.0
    beta: float = 0.9
    steps_per_temperature: int = 10
    total_steps: int = 200
    sigma_rel: float = 0.02

    def __post_init__(self):
        if not self.T0 > 0:
            raise ConfigError("must be > 0", "hybrid.sa.T0")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError("must lie in (0, 1)", "hybrid.sa.beta")
        if self.steps_per_temperature < 1:
            raise ConfigError("must be >= 1", "hybrid.sa.steps_per_temperature")
        if self.total_steps < 0:
            raise ConfigError("must be >= 0", "hybrid.sa.total_steps")
        if not self.sigma_rel > 0:
            raise ConfigError("must be > 0", "hybrid.sa.sigma_rel")

    def temperature(self, cooling_events: int) -> float:
        return self.T0 * self.beta**cooling_events


@dataclass(frozen=True)
class HillClimbConfig:
    """Coordinate pattern search parameters; step and tolerance are fractions of each range."""

    step: float = 0.05
    shrink: float = 0.5
    max_iterations: int = 200
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError("must be > 0", "hybrid.hill_climb.step")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigError("must lie in (0, 1)", "hybrid.hill_climb.shrink")
        if self.max_iterations < 0:
            raise ConfigError("must be >= 0", "hybrid.hill_climb.max_iterations")
        if not self.tolerance > 0:
            raise ConfigError("must be > 0", "hybrid.hill_climb.tolerance")


@dataclass(frozen=True)
class HybridConfig:
    mode: str = "mixed"
    lamarckian_fraction: float = 0.1
    searcher: str = "hill_climb"
    placement: str = "post"
    top_k: int = 5
    probability: float = 0.1
    sa: SaSchedule = field(default_factory=SaSchedule)
    hill_climb: HillClimbConfig = field(default_factory=HillClimbConfig)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"must be one of {MODES}", "hybrid.mode")
        if self.searcher not in SEARCHERS:
            raise ConfigError(f"must be one of {SEARCHERS}", "hybrid.searcher")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"must be one of {PLACEMENTS}", "hybrid.placement")
        for name in ("lamarckian_fraction", "probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError("must lie in [0, 1]", f"hybrid.{name}")
        if self.top_k < 0:
            raise ConfigError("must be >= 0", "hybrid.top_k")

    @property
    def lamarckian_probability(self) -> float:
        return {"lamarckian": 1.0, "baldwinian": 0.0}.get(self.mode, self.lamarckian_fraction)


# ---------------------------------------------------------------------------
# Simulated annealing
# ---------------------------------------------------------------------------

def sa_accept_prob(delta: float, T: float) -> float:
    """Probability of accepting a move that changes fitness by ``delta``.

    Improving or neutral moves (``delta >= 0``) are always accepted; worsening
    moves with probability ``exp(delta / T)``.
    """
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if delta >= 0:
        return 1.0
    return math.exp(delta / T)


def sa_local_search(x0, obj: Objective, space: SearchSpace, sched: SaSchedule, rng: RngStream,
                    callback: Optional[Callable] = None) -> tuple[np.ndarray, float]:
    """Anneal from ``x0`` and return the best point visited with its fitness.

    ``callback(x, f, T)`` is invoked after every accepted move.
    """
    x = clamp_to_bounds(x0, space).copy()
    f = obj(x)
    best_x, best_f = x.copy(), f
    scale = sched.sigma_rel * space.width
    cooled = 0
    T = sched.temperature(0)
    for step in range(1, sched.total_steps + 1):
        y = np.clip(x + scale * rng.standard_normal(space.n), space.lower, space.upper)
        fy = obj(y)
        if rng.random() < sa_accept_prob(fy - f, T):
            x, f = y, fy
            if callback is not None:
                callback(x, f, T)
            if f > best_f:
                best_x, best_f = x.copy(), f
        if step % sched.steps_per_temperature == 0:
            cooled += 1
            T = sched.temperature(cooled)
    return best_x, best_f


# ---------------------------------------------------------------------------
# Hill climbing
# ---------------------------------------------------------------------------

def hill_climb(x0, obj: Objective, space: SearchSpace, cfg: HillClimbConfig) -> tuple[np.ndarray, float]:
    """Greedy coordinate pattern search.

    Each iteration probes ``x +- step * range_i`` along every axis and moves to
    the best strictly improving probe; if none improves, the step shrinks.
    Stops after ``max_iterations`` iterations or once the step falls below
    ``tolerance``.
    """
    x = clamp_to_bounds(x0, space).copy()
    f = obj(x)
    step = cfg.step
    n = space.n
    for _ in range(cfg.max_iterations):
        if step < cfg.tolerance:
            break
        delta = step * space.width
        probes = np.repeat(x[None, :], 2 * n, axis=0)
        probes[np.arange(n), np.arange(n)] += delta
        probes[n + np.arange(n), np.arange(n)] -= delta
        probes = np.clip(probes, space.lower, space.upper)
        moved = np.any(probes != x, axis=1)
        if not moved.any():
            step *= cfg.shrink
            continue
        candidates = probes[moved]
        values = obj.evaluate_many(candidates)
        i = int(np.argmax(values))
        if values[i] > f:
            x, f = candidates[i].copy(), float(values[i])
        else:
            step *= cfg.shrink
    return x, f


# ---------------------------------------------------------------------------
# Write-back semantics
# ---------------------------------------------------------------------------

def apply_local_search(ind: Individual, result, mode: str, space: SearchSpace,
                       codec: Optional[BinaryCodec] = None) -> Individual:
    """Fold a local-search result ``(x_new, f_new)`` back into ``ind``.

    Without strict improvement the individual is returned unchanged. A
    Lamarckian write-back replaces genotype, phenotype and fitness; under
    binary encoding ``x_new`` must be a grid point of ``codec``. A Baldwinian
    write-back keeps the genotype and phenotype and only raises the fitness.
    """
    x_new, f_new = result
    x_new = np.asarray(x_new, dtype=float)
    space.check(x_new)
    if not space.contains(x_new):
        raise ValueError(f"local search result lies outside the search space: {x_new.tolist()}")
    if mode not in ("lamarckian", "baldwinian"):
        raise ValueError(f"unknown write-back mode {mode!r}")
    if ind.fitness is not None and not f_new > ind.fitness:
        return ind.copy()
    if mode == "baldwinian":
        return Individual(ind.genotype.copy(), ind.phenotype.copy(), float(f_new))
    if codec is None:
        return Individual(x_new.copy(), x_new.copy(), float(f_new))
    genotype = codec.encode(x_new)
    if not np.array_equal(codec.decode(genotype), x_new):
        raise ValueError("Lamarckian write-back under binary encoding needs a grid point")
    return Individual(genotype, x_new.copy(), float(f_new))


# ---------------------------------------------------------------------------
# Hybrid runner
# ---------------------------------------------------------------------------

class _LocalSearcher:
    """Runs the configured searcher and tracks the evaluations it spends."""

    def __init__(self, obj, space, ga_config, cfg: HybridConfig, rng: RngStream):
        self.obj = obj
        self.space = space
        self.cfg = cfg
        self.codec = ga_config.codec(space)
        self.rng = rng
        self.calls = 0
        self.evaluations = 0

    def search(self, x0):
        before = self.obj.evaluations
        if self.cfg.searcher == "sa":
            x, f = sa_local_search(x0, self.obj, self.space, self.cfg.sa, self.rng.spawn(self.calls))
        else:
            x, f = hill_climb(x0, self.obj, self.space, self.cfg.hill_climb)
        self.calls += 1
        if self.codec is not None:
            # write-back must stay on the codec grid: snap and re-score
            snapped = self.codec.decode(self.codec.encode(x))
            if not np.array_equal(snapped, x):
                x, f = snapped, self.obj(snapped)
        self.evaluations += self.obj.evaluations - before
        return x, f

    def improve(self, ind: Individual, mode: str, trace: RunTrace) -> Individual:
        x, f = self.search(ind.phenotype)
        genotype = x if self.codec is None else self.codec.encode(x)
        trace.offer(Individual(genotype, x, f))
        return apply_local_search(ind, (x, f), mode, self.space, self.codec)


def run_hybrid(obj: Objective, space: SearchSpace, ga_config: GaConfig, hybrid_config: HybridConfig,
               return_population: bool = False):
    """GA combined with local search.

    ``post`` placement runs the plain GA, then searches from the ``top_k``
    distinct best individuals of the final population. ``interleaved``
    placement gives every individual of every generation (the initial one
    included) a chance ``probability`` of being searched. Each search picks
    Lamarckian write-back with probability ``lamarckian_probability``.

    The trace's ``best`` is always a point that was actually evaluated, so a
    Baldwinian run still reports where the best fitness was found.
    """
    cfg = hybrid_config
    root = RngStream(ga_config.seed)
    rng = root.spawn(_HYBRID_STREAM)
    searcher = _LocalSearcher(obj, space, ga_config, cfg, rng.spawn(0))
    lamarck_p = cfg.lamarckian_probability

    def pick_mode() -> str:
        if lamarck_p in (0.0, 1.0):
            return "lamarckian" if lamarck_p == 1.0 else "baldwinian"
        return "lamarckian" if rng.random() < lamarck_p else "baldwinian"

    def interleave(pop: Population, trace: RunTrace) -> Population:
        if cfg.probability == 0.0:
            return pop
        chosen = np.flatnonzero(rng.random(len(pop)) < cfg.probability)
        if chosen.size == 0:
            return pop
        individuals = list(pop)
        for i in chosen:
            individuals[i] = searcher.improve(individuals[i], pick_mode(), trace)
        return Population.from_individuals(individuals, pop.generation)

    t0 = time.perf_counter()
    start = obj.evaluations
    hook = interleave if cfg.placement == "interleaved" else None
    trace, pop = run_ga(obj, space, ga_config, rng=root, on_generation=hook, return_population=True)

    if cfg.placement == "post" and cfg.top_k > 0:
        individuals = list(pop)
        seen = []
        for i in pop.ranking():
            if len(seen) == cfg.top_k:
                break
            if any(np.array_equal(individuals[i].phenotype, p) for p in seen):
                continue
            seen.append(individuals[i].phenotype)
            individuals[i] = searcher.improve(individuals[i], pick_mode(), trace)
        pop = Population.from_individuals(individuals, pop.generation)

    trace.local_search_evaluations = searcher.evaluations
    trace.evaluations = obj.evaluations - start
    trace.wall_time = time.perf_counter() - t0
    return (trace, pop) if return_population else trace
