"""
Plain genetic algorithm on Rastrigin
====================================

Runs the real-coded GA with its default settings, prints the convergence
trace every 20 generations and then repeats the run with a binary encoding.
"""

import numpy as np

from evoscheme.engine import default_config, run_ga
from evoscheme.harness import get_benchmark

fn = get_benchmark("rastrigin", 5)
cfg = default_config(fn.n, seed=1)
print(f"pop_size={cfg.pop_size}  pm={cfg.variation.pm:.3f}  generations={cfg.max_generations}")

trace = run_ga(fn.objective(), fn.space, cfg)
for rec in trace.records[::20]:
    print(f"gen {rec.generation:4d}  best {rec.best_fitness:10.4f}  mean {rec.mean_fitness:10.4f}")
print("stopped by", trace.stop_reason, "at", np.round(trace.best.phenotype, 3))

# the best-fitness column never drops thanks to elitism
assert np.all(np.diff(trace.best_series) >= 0)

###############################################################################
# Binary encoding: 16 bits per variable, bit-flip mutation at 1/(n*b)

bin_cfg = default_config(fn.n, encoding="binary", bits_per_variable=16, seed=1)
bin_trace = run_ga(fn.objective(), fn.space, bin_cfg)
print(f"binary: best {bin_trace.best.fitness:.4f} after {bin_trace.evaluations} evaluations")
print("genotype length", bin_trace.best.genotype.size)
