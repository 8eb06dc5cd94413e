"""
Benchmarking and population-size tuning
=======================================

Scores replicated runs against known optima and checks whether doubling
the population would pay off.
"""

from evoscheme.engine import default_config
from evoscheme.harness import builtin_functions, collet_quality, population_size_study
from evoscheme.hybrid import HybridConfig

hybrid = HybridConfig(placement="post", searcher="hill_climb", top_k=5)

for fn in builtin_functions(n=4):
    cfg = default_config(fn.n)
    plain = collet_quality(fn, cfg, R=10)
    hyb = collet_quality(fn, cfg, R=10, hybrid=hybrid)
    print(f"{fn.name:10s} plain {plain.mean_quality:.4f}  hybrid {hyb.mean_quality:.4f}  "
          f"passes 99%: {hyb.passed}")

###############################################################################
# Population-size study at N/2, N and 2N with the same generation budget

fn = builtin_functions(n=6)[1]  # rastrigin
report = population_size_study(fn, default_config(fn.n), replicates=10)
for variant in report.to_dict()["variants"]:
    print(f"N={variant['pop_size']:3d}  mean best {variant['mean_best']:9.4f} +- {variant['std_best']:.4f}")
print("recommendation:", report.recommendation)
