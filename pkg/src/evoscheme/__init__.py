"""Genetic-algorithm-centred toolkit for single-objective continuous optimization.

Fitness is always maximized; pass ``-f`` to minimize ``f``.
"""

from .core import (
    ConfigError,
    DimensionError,
    EvaluationError,
    EvoSchemeError,
    GenerationRecord,
    Individual,
    Objective,
    Population,
    RngStream,
    RunTrace,
    SearchSpace,
    clamp_to_bounds,
    evaluate,
    population_stats,
    random_point,
)
from .engine import (
    GaConfig,
    SeedRegion,
    StoppingRule,
    default_config,
    init_population,
    run_ga,
    select_parent,
    step_generation,
)
from .harness import (
    BenchmarkFunction,
    builtin_functions,
    collet_quality,
    get_benchmark,
    population_size_study,
    run_replicates,
)
from .hybrid import (
    HillClimbConfig,
    HybridConfig,
    SaSchedule,
    apply_local_search,
    hill_climb,
    run_hybrid,
    sa_accept_prob,
    sa_local_search,
)
from .landscape import ga_scan, lhs_sample, separability_probe, slice_grid
from .operators import (
    BinaryCodec,
    RecombinationWeights,
    VariationConfig,
    bitflip_mutate,
    decode_binary,
    gaussian_mutate,
    intermediate_recombine,
    one_point_crossover,
    sigma_at_generation,
)

__version__ = "0.1.0"
