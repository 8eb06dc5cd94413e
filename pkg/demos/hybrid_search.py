"""
Hybrid GA with local search
===========================

Compares a plain GA run with hybrids that polish the final population by
hill climbing, under Lamarckian and Baldwinian write-back.
"""

from evoscheme.engine import default_config, run_ga
from evoscheme.harness import get_benchmark
from evoscheme.hybrid import HybridConfig, SaSchedule, run_hybrid

fn = get_benchmark("sphere", 10)
cfg = default_config(fn.n, seed=4)

plain = run_ga(fn.objective(), fn.space, cfg)
print(f"plain GA      best {plain.best.fitness:.3e}  evaluations {plain.evaluations}")

# With post placement nothing evolves after the search, so the write-back mode
# only changes the returned population, not the best point found.
for mode in ("lamarckian", "baldwinian", "mixed"):
    hcfg = HybridConfig(mode=mode, searcher="hill_climb", placement="post", top_k=5)
    trace = run_hybrid(fn.objective(), fn.space, cfg, hcfg)
    print(f"{mode:12s}  best {trace.best.fitness:.3e}  "
          f"local search spent {trace.local_search_evaluations} of {trace.evaluations}")

###############################################################################
# Interleaved simulated annealing: each individual is annealed with
# probability 0.05 in every generation.

sa = SaSchedule(T0=1.0, beta=0.9, steps_per_temperature=10, total_steps=100)
hcfg = HybridConfig(mode="lamarckian", searcher="sa", placement="interleaved", probability=0.05, sa=sa)
trace = run_hybrid(fn.objective(), fn.space, cfg, hcfg)
print(f"interleaved SA best {trace.best.fitness:.3e} after {trace.generations} generations")
