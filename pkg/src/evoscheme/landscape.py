"""Fitness-landscape probes: Latin hypercube designs, 2-D slices,
additive-separability checks and GA scans."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .core import Individual, Objective, RngStream, SearchSpace
from .engine import GaConfig, run_ga


@dataclass
class LhsDesign:
    """Latin hypercube sample.

    ``strata[k, i]`` is the stratum (0..N-1) that sample ``k`` occupies along
    dimension ``i``; every column is a permutation of ``range(N)``.
    """

    points: np.ndarray
    strata: np.ndarray
    space: SearchSpace
    fitness: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.points)


def lhs_sample(space: SearchSpace, N: int, rng: RngStream) -> LhsDesign:
    if N < 1:
        raise ValueError("N must be >= 1")
    strata = np.stack([rng.permutation(N) for _ in range(space.n)], axis=1)
    u = rng.random((N, space.n))
    width = space.width / N
    points = space.lower + (strata + u) * width
    # u < 1 but the sum can round up onto the next stratum's edge
    upper_edge = space.lower + (strata + 1) * width
    points = np.where(points >= upper_edge, np.nextafter(upper_edge, -np.inf), points)
    return LhsDesign(points, strata, space)


def evaluate_design(obj: Objective, design: LhsDesign) -> LhsDesign:
    design.fitness = obj.evaluate_many(design.points)
    return design


@dataclass
class SliceGrid:
    """Fitness on an ``r x r`` lattice over dimensions ``i`` (rows) and ``j`` (columns)."""

    base: np.ndarray
    i: int
    j: int
    xi: np.ndarray
    xj: np.ndarray
    values: np.ndarray

    @property
    def resolution(self) -> int:
        return len(self.xi)

    def rows(self):
        """Yield ``(xi, xj, fitness)`` triples in row-major order."""
        for a, xa in enumerate(self.xi):
            for b, xb in enumerate(self.xj):
                yield xa, xb, self.values[a, b]


def slice_grid(obj: Objective, space: SearchSpace, base, i: int, j: int, r: int) -> SliceGrid:
    """Vary coordinates ``i`` and ``j`` over their full ranges, endpoints
    included, with every other coordinate frozen at ``base``."""
    base = space.check(base).astype(float)
    if i == j:
        raise ValueError("slice dimensions must differ")
    if not (0 <= i < space.n and 0 <= j < space.n):
        raise ValueError(f"slice dimensions must lie in 0..{space.n - 1}")
    if r < 2:
        raise ValueError("resolution must be >= 2")
    if not space.contains(base):
        raise ValueError("base point lies outside the search space")
    xi = np.linspace(space.lower[i], space.upper[i], r)
    xj = np.linspace(space.lower[j], space.upper[j], r)
    grid = np.repeat(base[None, :], r * r, axis=0)
    grid[:, i] = np.repeat(xi, r)
    grid[:, j] = np.tile(xj, r)
    values = obj.evaluate_many(grid).reshape(r, r)
    return SliceGrid(base, i, j, xi, xj, values)


@dataclass
class SeparabilityReport:
    residuals: dict = field(default_factory=dict)
    tolerance: float = 0.0

    @property
    def pairs(self) -> dict:
        return {pair: bool(res <= self.tolerance) for pair, res in self.residuals.items()}

    @property
    def separable(self) -> bool:
        return all(self.pairs.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def separability_probe(obj: Objective, space: SearchSpace, trials: int = 8, tol: Optional[float] = None,
                       rng: Optional[RngStream] = None) -> SeparabilityReport:
    """Pairwise mixed-difference test for additive separability.

    For a pair ``(i, j)`` the residual
    ``|f(a_i, a_j) + f(b_i, b_j) - f(a_i, b_j) - f(b_i, a_j)|`` (other
    coordinates frozen at a random base) vanishes whenever ``f`` splits into
    a part depending on ``x_i`` and a part not depending on ``x_j``.

    When ``tol`` is None it becomes ``1e-6 * (max |f| sampled + 1)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if tol is not None and not tol > 0:
        raise ValueError("tol must be > 0")
    rng = rng or RngStream(0)
    pairs = list(combinations(range(space.n), 2))
    residuals = {}
    fmax = 0.0
    for i, j in pairs:
        z = space.lower + rng.random((trials, space.n)) * space.width
        a = space.lower[[i, j]] + rng.random((trials, 2)) * space.width[[i, j]]
        b = space.lower[[i, j]] + rng.random((trials, 2)) * space.width[[i, j]]
        corners = np.repeat(z[:, None, :], 4, axis=1)
        corners[:, 0, [i, j]] = a
        corners[:, 1, [i, j]] = b
        corners[:, 2, i], corners[:, 2, j] = a[:, 0], b[:, 1]
        corners[:, 3, i], corners[:, 3, j] = b[:, 0], a[:, 1]
        f = obj.evaluate_many(corners.reshape(-1, space.n)).reshape(trials, 4)
        fmax = max(fmax, float(np.abs(f).max()))
        residuals[(i, j)] = float(np.abs(f[:, 0] + f[:, 1] - f[:, 2] - f[:, 3]).max())
    if tol is None:
        tol = 1e-6 * (fmax + 1.0)
    return SeparabilityReport(residuals, tol)


def dedup_ranked(individuals, radius: float) -> list[Individual]:
    """Sort by fitness (descending, stable) and drop any individual within
    ``radius`` of a fitter one already kept."""
    ranked = sorted(individuals, key=lambda ind: -ind.fitness)
    kept: list[Individual] = []
    for ind in ranked:
        if all(np.linalg.norm(ind.phenotype - k.phenotype) > radius for k in kept):
            kept.append(ind)
    return kept


def ga_scan(obj: Objective, space: SearchSpace, config: GaConfig,
            dedup_radius: Optional[float] = None) -> list[Individual]:
    """Run the GA and return its final population as a ranked list of
    distinct good solutions. Default radius is ``1e-6`` of the box diagonal."""
    if dedup_radius is None:
        dedup_radius = 1e-6 * space.diagonal
    _, pop = run_ga(obj, space, config, return_population=True)
    return dedup_ranked(list(pop), dedup_radius)
