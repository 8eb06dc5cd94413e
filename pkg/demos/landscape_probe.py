"""
Looking at a fitness landscape
==============================

Latin hypercube sampling, a two-variable slice and the pairwise
separability probe, on a separable and a coupled function.
"""

import numpy as np

from evoscheme import Objective, RngStream, SearchSpace
from evoscheme.harness import get_benchmark
from evoscheme.landscape import lhs_sample, evaluate_design, separability_probe, slice_grid

fn = get_benchmark("ackley", 4)
obj = fn.objective()
rng = RngStream(0)

design = evaluate_design(obj, lhs_sample(fn.space, 50, rng.spawn(1)))
top = np.argsort(design.fitness)[::-1][:3]
print("best LHS samples:")
for k in top:
    print("  ", np.round(design.points[k], 2), round(float(design.fitness[k]), 3))

grid = slice_grid(obj, fn.space, np.zeros(fn.n), 0, 1, 41)
print(f"slice over x1, x2: {grid.values.shape}, peak {grid.values.max():.3f}")

###############################################################################
# Separability: Rastrigin splits into per-variable terms, Rosenbrock couples
# neighbouring variables.

for name in ("rastrigin", "rosenbrock"):
    bench = get_benchmark(name, 4)
    rep = separability_probe(bench.objective(), bench.space, rng=rng.spawn(2))
    coupled = [pair for pair, ok in rep.pairs.items() if not ok]
    print(f"{name:10s} separable={rep.separable}  coupled pairs {coupled}")

product = Objective(lambda X: X[:, 0] * X[:, 1], 2, vectorized=True)
rep = separability_probe(product, SearchSpace.uniform(2, -1, 1))
print(f"x1*x2      residual {rep.residuals[(0, 1)]:.3f}")
