"""Problem model shared by every optimizer in the package.

All fitness values are in the maximization sense. Minimization problems are
handled by negating the objective before handing it over.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np


class EvoSchemeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(EvoSchemeError, ValueError):
    """A vector does not have the length the search space expects."""


class EvaluationError(EvoSchemeError):
    """The objective returned a non-finite value."""

    def __init__(self, x, value):
        self.x = np.array(x, dtype=float, copy=True)
        self.value = value
        super().__init__(f"objective returned non-finite value {value!r} at x={self.x.tolist()}")


class ConfigError(EvoSchemeError, ValueError):
    """A configuration value violates its contract.

    ``field`` holds the dotted name of the offending entry when known.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------

class RngStream:
    """Seeded random stream backed by numpy's PCG64.

    The bit stream of PCG64 seeded through ``SeedSequence`` is fixed across
    platforms, so two streams built from the same ``(seed, key)`` draw
    identical sequences. Child streams from :meth:`spawn` depend only on the
    seed and key path, never on how many draws the parent has made.
    """

    def __init__(self, seed: int = 0, key: Sequence[int] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer", "seed")
        self.seed = seed
        self.key = tuple(int(k) for k in key)
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self.key)))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self.key})"

    def spawn(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(key))

    def random(self, size=None):
        return self._gen.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def permutation(self, n):
        return self._gen.permutation(n)

    def choice(self, a, size=None, replace=True, p=None):
        return self._gen.choice(a, size=size, replace=replace, p=p)


# ---------------------------------------------------------------------------
# Search space and objective
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchSpace:
    """Box-bounded continuous domain."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigError("lower and upper must be 1-D arrays of equal length", "space")
        if lower.size < 1:
            raise ConfigError("dimension must be at least 1", "space")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigError("bounds must be finite", "space")
        if np.any(lower >= upper):
            raise ConfigError("every lower bound must be strictly below its upper bound", "space")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, n: int, low: float, high: float) -> "SearchSpace":
        return cls(np.full(n, float(low)), np.full(n, float(high)))

    @classmethod
    def from_bounds(cls, bounds) -> "SearchSpace":
        bounds = np.asarray(bounds, dtype=float)
        return cls(bounds[:, 0], bounds[:, 1])

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.width))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise DimensionError(f"expected vectors of length {self.n}, got shape {x.shape}")
        return x

    def __eq__(self, other):
        if not isinstance(other, SearchSpace):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


class Objective:
    """Counted fitness function.

    Parameters
    ----------
    fn : callable
        Maps a phenotype of length ``n`` to a scalar fitness. With
        ``vectorized=True`` it instead maps an ``(k, n)`` array to ``k``
        fitness values.
    n : int, optional
        Expected phenotype length; checked on every call when given.
    vectorized : bool
        Whether ``fn`` accepts a batch of phenotypes.
    workers : int
        Thread count used by :meth:`evaluate_many`. Results are merged in
        input order, so the outcome never depends on this value.
    f_opt, x_opt : optional
        Known optimum value and location, for benchmarking.
    """

    def __init__(self, fn: Callable, n: Optional[int] = None, *, vectorized: bool = False,
                 workers: int = 1, f_opt: Optional[float] = None, x_opt=None, name: str = ""):
        if workers < 1:
            raise ConfigError("workers must be >= 1", "workers")
        self.fn = fn
        self.n = n
        self.vectorized = vectorized
        self.workers = int(workers)
        self.f_opt = f_opt
        self.x_opt = None if x_opt is None else np.asarray(x_opt, dtype=float)
        self.name = name or getattr(fn, "__name__", "objective")
        self.evaluations = 0
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Objective({self.name!r}, n={self.n}, evaluations={self.evaluations})"

    def _check_shape(self, x: np.ndarray):
        if self.n is not None and x.shape[-1] != self.n:
            raise DimensionError(f"expected vectors of length {self.n}, got shape {x.shape}")

    def _raw_batch(self, X: np.ndarray) -> np.ndarray:
        if self.vectorized:
            return np.asarray(self.fn(X), dtype=float).reshape(len(X))
        return np.array([float(self.fn(row)) for row in X], dtype=float)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise DimensionError(f"expected a 1-D phenotype, got shape {x.shape}")
        self._check_shape(x)
        value = float(self._raw_batch(x[None, :])[0])
        with self._lock:
            self.evaluations += 1
        if not np.isfinite(value):
            raise EvaluationError(x, value)
        return value

    def evaluate_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DimensionError(f"expected a 2-D batch of phenotypes, got shape {X.shape}")
        if len(X) == 0:
            return np.empty(0)
        self._check_shape(X)
        if self.workers == 1 or len(X) == 1:
            values = self._raw_batch(X)
        else:
            chunks = np.array_split(X, min(self.workers, len(X)))
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                values = np.concatenate(list(pool.map(self._raw_batch, chunks)))
        with self._lock:
            self.evaluations += len(X)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise EvaluationError(X[bad[0]], values[bad[0]])
        return values


def evaluate(obj: Objective, x) -> float:
    """Evaluate ``obj`` at ``x``, incrementing its counter by one."""
    return obj(x)


def random_point(space: SearchSpace, rng: RngStream, size: Optional[int] = None) -> np.ndarray:
    """Uniform draw from the box; ``size`` rows when given."""
    shape = space.n if size is None else (size, space.n)
    return space.lower + rng.random(shape) * space.width


def clamp_to_bounds(x, space: SearchSpace) -> np.ndarray:
    x = space.check(x)
    return np.clip(x, space.lower, space.upper)


# ---------------------------------------------------------------------------
# Individuals and populations
# ---------------------------------------------------------------------------

@dataclass
class Individual:
    """One candidate solution.

    For real encoding the genotype is the phenotype itself; for binary
    encoding it is a ``uint8`` bit vector whose decode is the phenotype.
    """

    genotype: np.ndarray
    phenotype: np.ndarray
    fitness: Optional[float] = None

    def copy(self) -> "Individual":
        return Individual(self.genotype.copy(), self.phenotype.copy(), self.fitness)


@dataclass
class Population:
    """A generation of individuals, stored row-wise.

    ``fitness`` holds NaN for individuals not yet evaluated.
    """

    genotypes: np.ndarray
    phenotypes: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    def __post_init__(self):
        if not (len(self.genotypes) == len(self.phenotypes) == len(self.fitness)):
            raise ValueError("genotypes, phenotypes and fitness must have equal length")

    def __len__(self):
        return len(self.fitness)

    def __getitem__(self, i) -> Individual:
        f = self.fitness[i]
        return Individual(self.genotypes[i].copy(), self.phenotypes[i].copy(),
                          None if np.isnan(f) else float(f))

    def __iter__(self) -> Iterator[Individual]:
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_individuals(cls, individuals: Sequence[Individual], generation: int = 0) -> "Population":
        fitness = np.array([np.nan if ind.fitness is None else ind.fitness for ind in individuals])
        return cls(np.array([ind.genotype for ind in individuals]),
                   np.array([ind.phenotype for ind in individuals], dtype=float),
                   fitness, generation)

    def copy(self) -> "Population":
        return Population(self.genotypes.copy(), self.phenotypes.copy(), self.fitness.copy(), self.generation)

    @property
    def evaluated(self) -> bool:
        return not np.any(np.isnan(self.fitness))

    def ranking(self) -> np.ndarray:
        """Indices from best to worst; ties keep the lower index first."""
        return np.lexsort((np.arange(len(self)), -self.fitness))

    def best_index(self) -> int:
        return int(self.ranking()[0])


def population_stats(pop: Population) -> tuple[float, float, float]:
    """Return ``(best, mean, std)`` of the fitness values (std divisor N)."""
    if len(pop) == 0:
        raise ValueError("empty population")
    if not pop.evaluated:
        raise ValueError("population contains unevaluated individuals")
    f = pop.fitness
    if f.min() == f.max():
        # numpy's mean of equal values can be off by an ulp
        return float(f[0]), float(f[0]), 0.0
    return float(f.max()), float(f.mean()), float(f.std())


# ---------------------------------------------------------------------------
# Run trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    std_fitness: float
    cumulative_evaluations: int


@dataclass
class RunTrace:
    """Per-generation statistics of one run plus its best solution.

    ``records[0]`` describes the initial population. ``local_search_evaluations``
    counts the evaluations spent by local searchers and is already included in
    the cumulative counts and in ``evaluations``.
    """

    records: list[GenerationRecord] = field(default_factory=list)
    best: Optional[Individual] = None
    evaluations: int = 0
    local_search_evaluations: int = 0
    wall_time: float = 0.0
    seed: Optional[int] = None
    stop_reason: str = ""

    @property
    def generations(self) -> int:
        return len(self.records) - 1

    @property
    def best_series(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.records])

    @property
    def initial_mean(self) -> float:
        return self.records[0].mean_fitness

    def record(self, pop: Population, evaluations: int):
        best, mean, std = population_stats(pop)
        self.records.append(GenerationRecord(pop.generation, best, mean, std, int(evaluations)))
        self.evaluations = int(evaluations)

    def offer(self, ind: Individual):
        """Keep ``ind`` as the best solution if it beats the current one."""
        if self.best is None or ind.fitness > self.best.fitness:
            self.best = ind.copy()
