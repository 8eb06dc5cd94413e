"""Generational genetic algorithm with elitism."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    ConfigError,
    Individual,
    Objective,
    Population,
    RngStream,
    RunTrace,
    SearchSpace,
    random_point,
)
from .operators import (
    BinaryCodec,
    VariationConfig,
    bitflip_mutate,
    gaussian_mutate,
    one_point_crossover,
    sigma_at_generation,
)

ENCODINGS = ("real", "binary")
SELECTIONS = ("tournament", "rank")


@dataclass(frozen=True)
class StoppingRule:
    """When to stop a run.

    The run ends after ``max_generations`` generations, once ``max_evaluations``
    is reached (checked between generations), or when the best fitness gained
    less than ``stagnation_eps`` over the last ``stagnation_window`` generations.
    ``stagnation_window=None`` disables the stagnation test.
    """

    max_generations: int = 200
    max_evaluations: Optional[int] = None
    stagnation_window: Optional[int] = 50
    stagnation_eps: float = 1e-12

    def __post_init__(self):
        if self.max_generations < 0:
            raise ConfigError("must be >= 0", "ga.max_generations")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigError("must be >= 1", "ga.max_evaluations")
        if self.stagnation_window is not None and self.stagnation_window < 1:
            raise ConfigError("must be >= 1", "ga.stagnation_window")
        if not self.stagnation_eps >= 0:
            raise ConfigError("must be >= 0", "ga.stagnation_eps")

    def check(self, trace: RunTrace) -> Optional[str]:
        """Reason to stop after the latest record, or None to continue."""
        t = trace.generations
        if t >= self.max_generations:
            return "max_generations"
        if self.max_evaluations is not None and trace.evaluations >= self.max_evaluations:
            return "max_evaluations"
        w = self.stagnation_window
        if w is not None and t >= w:
            series = trace.records
            if series[t].best_fitness - series[t - w].best_fitness < self.stagnation_eps:
                return "stagnation"
        return None


@dataclass(frozen=True)
class SeedRegion:
    """Sub-box of the search space supplying ``fraction`` of the initial population."""

    lower: tuple
    upper: tuple
    fraction: float

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError("fraction must lie in [0, 1]", "ga.seed_regions")

    def space(self) -> SearchSpace:
        return SearchSpace(np.array(self.lower), np.array(self.upper))

    def count(self, pop_size: int) -> int:
        return math.floor(self.fraction * pop_size + 1e-9)


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 20
    encoding: str = "real"
    bits_per_variable: int = 16
    variation: VariationConfig = field(default_factory=VariationConfig)
    elitism_k: int = 1
    selection: str = "tournament"
    tournament_size: int = 2
    stopping: StoppingRule = field(default_factory=StoppingRule)
    seed: int = 0
    seed_regions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "seed_regions", tuple(self.seed_regions))
        if self.pop_size < 2:
            raise ConfigError("must be >= 2", "ga.pop_size")
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"must be one of {ENCODINGS}", "ga.encoding")
        if not 0 <= self.elitism_k < self.pop_size:
            raise ConfigError("must satisfy 0 <= elitism_k < pop_size", "ga.elitism_k")
        if self.selection not in SELECTIONS:
            raise ConfigError(f"must be one of {SELECTIONS}", "ga.selection")
        if self.tournament_size < 2:
            raise ConfigError("must be >= 2", "ga.tournament_size")
        if sum(r.fraction for r in self.seed_regions) > 1.0 + 1e-12:
            raise ConfigError("region fractions sum to more than 1", "ga.seed_regions")

    @property
    def max_generations(self) -> int:
        return self.stopping.max_generations

    def codec(self, space: SearchSpace) -> Optional[BinaryCodec]:
        if self.encoding == "binary":
            return BinaryCodec(space, self.bits_per_variable)
        return None

    def with_seed(self, seed: int) -> "GaConfig":
        return replace(self, seed=seed)


def default_config(n: int, encoding: str = "real", bits_per_variable: int = 16, seed: int = 0) -> GaConfig:
    """Starting-point parameters for an ``n``-variable problem.

    Population size follows the problem size, clamped to [20, 200]. The
    mutation rate is one over the number of genes, so about one gene changes
    per child: ``1/n`` for real encoding and ``1/(n*b)`` for binary.
    """
    if n < 1:
        raise ConfigError("dimension must be >= 1", "n")
    genes = n if encoding == "real" else n * bits_per_variable
    return GaConfig(
        pop_size=min(max(n, 20), 200),
        encoding=encoding,
        bits_per_variable=bits_per_variable,
        variation=VariationConfig(pc=0.9, pm=1.0 / genes, sigma_rel=0.1, gamma=0.99),
        elitism_k=1,
        selection="tournament",
        tournament_size=2,
        stopping=StoppingRule(max_generations=200, stagnation_window=50, stagnation_eps=1e-12),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Initialization and selection
# ---------------------------------------------------------------------------

def _make_population(phenotypes, genotypes, obj: Objective, generation: int) -> Population:
    fitness = obj.evaluate_many(phenotypes)
    return Population(genotypes, phenotypes, fitness, generation)


def init_population(space: SearchSpace, config: GaConfig, obj: Objective, rng: RngStream) -> Population:
    """Draw and evaluate the initial population.

    Each seed region contributes ``floor(fraction * N)`` individuals drawn
    uniformly from its sub-box, in declaration order; the rest are uniform
    over the whole space.
    """
    n_pop = config.pop_size
    codec = config.codec(space)
    counts = [r.count(n_pop) for r in config.seed_regions]
    if sum(counts) > n_pop:
        raise ConfigError("seed regions request more individuals than the population holds", "ga.seed_regions")
    blocks = []
    for region, k in zip(config.seed_regions, counts):
        sub = region.space()
        if sub.n != space.n or np.any(sub.lower < space.lower) or np.any(sub.upper > space.upper):
            raise ConfigError("seed region must lie inside the search space", "ga.seed_regions")
        if k:
            blocks.append(random_point(sub, rng, k))
    rest = n_pop - sum(counts)
    if codec is None:
        if rest:
            blocks.append(random_point(space, rng, rest))
        phenotypes = np.concatenate(blocks) if blocks else np.empty((0, space.n))
        genotypes = phenotypes.copy()
    else:
        seeded = codec.encode(np.concatenate(blocks)) if blocks else np.empty((0, codec.length), np.uint8)
        genotypes = np.concatenate([seeded, codec.random(rng, rest)]).astype(np.uint8)
        phenotypes = codec.decode(genotypes)
    return _make_population(phenotypes, genotypes, obj, 0)


def select_indices(fitness, scheme: str, rng: RngStream, count: int, tournament_size: int = 2) -> np.ndarray:
    """Indices of ``count`` independently selected parents.

    Tournaments draw ``tournament_size`` distinct contestants (capped at the
    population size) and keep the fittest, ties going to the lowest index.
    Rank selection weights the individual of rank ``r`` (1 = best) by
    ``N - r + 1``.
    """
    fitness = np.asarray(fitness, dtype=float)
    n_pop = len(fitness)
    if n_pop == 0:
        raise ValueError("cannot select from an empty population")
    if scheme == "tournament":
        s = min(tournament_size, n_pop)
        contestants = np.argsort(rng.random((count, n_pop)), axis=1, kind="stable")[:, :s]
        f = fitness[contestants]
        top = f == f.max(axis=1, keepdims=True)
        return np.where(top, contestants, n_pop).min(axis=1)
    if scheme == "rank":
        order = np.lexsort((np.arange(n_pop), -fitness))
        weights = np.empty(n_pop)
        weights[order] = np.arange(n_pop, 0, -1)
        return rng.choice(n_pop, size=count, p=weights / weights.sum())
    raise ValueError(f"unknown selection scheme {scheme!r}")


def select_parent(pop: Population, scheme: str, rng: RngStream, tournament_size: int = 2) -> Individual:
    if not pop.evaluated:
        raise ValueError("population contains unevaluated individuals")
    return pop[int(select_indices(pop.fitness, scheme, rng, 1, tournament_size)[0])]


# ---------------------------------------------------------------------------
# Generational step
# ---------------------------------------------------------------------------

def _vary_real(pa, pb, space, config, rng, t):
    var = config.variation
    cross = rng.random(len(pa)) < var.pc
    alpha = rng.random(len(pa))[:, None]
    lo, hi = np.minimum(pa, pb), np.maximum(pa, pb)
    c1 = np.where(cross[:, None], np.clip(alpha * pa + (1 - alpha) * pb, lo, hi), pa)
    c2 = np.where(cross[:, None], np.clip((1 - alpha) * pa + alpha * pb, lo, hi), pb)
    children = np.stack([c1, c2], axis=1).reshape(-1, space.n)
    sigma = sigma_at_generation(var.sigma_rel, var.gamma, t)
    return gaussian_mutate(children, sigma, var.pm, space, rng)


def _vary_binary(pa, pb, config, rng):
    var = config.variation
    cross = rng.random(len(pa)) < var.pc
    x1, x2 = one_point_crossover(pa, pb, rng)
    c1 = np.where(cross[:, None], x1, pa)
    c2 = np.where(cross[:, None], x2, pb)
    children = np.stack([c1, c2], axis=1).reshape(-1, pa.shape[1])
    return bitflip_mutate(children, var.pm, rng)


def step_generation(pop: Population, space: SearchSpace, config: GaConfig, obj: Objective,
                    rng: RngStream) -> Population:
    """Produce the next generation.

    The ``elitism_k`` best individuals are copied unchanged. The remaining
    slots are filled pairwise: two parents are selected, recombined with
    probability ``pc`` (cloned otherwise), both children mutated and then
    evaluated. When an odd number of slots remains, the last pair's second
    child is discarded.
    """
    if not pop.evaluated:
        raise ValueError("population contains unevaluated individuals")
    n_pop = len(pop)
    k = config.elitism_k
    need = n_pop - k
    elite = pop.ranking()[:k]
    pairs = (need + 1) // 2
    idx = select_indices(pop.fitness, config.selection, rng, 2 * pairs, config.tournament_size)
    pa, pb = pop.genotypes[idx[0::2]], pop.genotypes[idx[1::2]]
    codec = config.codec(space)
    if codec is None:
        genotypes = _vary_real(pa, pb, space, config, rng, pop.generation)[:need]
        phenotypes = genotypes.copy()
    else:
        genotypes = _vary_binary(pa, pb, config, rng)[:need]
        phenotypes = codec.decode(genotypes)
    fitness = obj.evaluate_many(phenotypes)
    return Population(
        np.concatenate([pop.genotypes[elite], genotypes]),
        np.concatenate([pop.phenotypes[elite], phenotypes]),
        np.concatenate([pop.fitness[elite], fitness]),
        pop.generation + 1,
    )


GenerationHook = Callable[[Population, RunTrace], Population]


def run_ga(obj: Objective, space: SearchSpace, config: GaConfig, *,
           rng: Optional[RngStream] = None, on_generation: Optional[GenerationHook] = None,
           return_population: bool = False):
    """Run the GA until the stopping rule fires.

    ``on_generation`` is called with every new population (including the
    initial one) before it is recorded and may return a modified population;
    the hybrid optimizer uses it to interleave local search.

    Returns the :class:`RunTrace`, or ``(trace, final_population)`` when
    ``return_population`` is set.
    """
    t0 = time.perf_counter()
    rng = rng or RngStream(config.seed)
    start = obj.evaluations
    trace = RunTrace(seed=config.seed)

    def settle(pop):
        if on_generation is not None:
            pop = on_generation(pop, trace)
        trace.record(pop, obj.evaluations - start)
        trace.offer(pop[pop.best_index()])
        return pop

    pop = settle(init_population(space, config, obj, rng))
    while (reason := config.stopping.check(trace)) is None:
        pop = settle(step_generation(pop, space, config, obj, rng))
    trace.stop_reason = reason
    trace.wall_time = time.perf_counter() - t0
    return (trace, pop) if return_population else trace
