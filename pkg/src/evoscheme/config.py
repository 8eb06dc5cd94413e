"""Run configuration files.

A configuration is a JSON object::

    {
      "version": 1,
      "problem": "sphere",              # builtin name, or {"command": [...], "f_opt": 0.0}
      "n": 5,
      "seed": 1,
      "space": {"lower": [...], "upper": [...]},   # optional for builtins
      "ga": {...}, "hybrid": {...}, "landscape": {...},
      "harness": {...}, "output": {...}
    }

Unknown keys anywhere are rejected. Missing sections take their defaults and
:func:`resolve` returns the fully expanded document, which loads back to an
identical configuration.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ConfigError, SearchSpace
from .engine import GaConfig, SeedRegion, StoppingRule, default_config
from .harness import BENCHMARK_NAMES, BenchmarkFunction, get_benchmark
from .hybrid import HillClimbConfig, HybridConfig, SaSchedule
from .operators import VariationConfig

SCHEMA_VERSION = 1
SEED_ENV = "EVOSCHEME_SEED"


@dataclass(frozen=True)
class ProblemSpec:
    name: Optional[str] = None
    command: Optional[tuple] = None
    f_opt: Optional[float] = None

    def to_json(self):
        if self.command is None:
            return self.name
        return {"command": list(self.command), "f_opt": self.f_opt}


@dataclass(frozen=True)
class LandscapeConfig:
    lhs_samples: int = 100
    slice_i: Optional[int] = None
    slice_j: Optional[int] = None
    slice_resolution: int = 50
    base: Optional[tuple] = None
    probe_trials: int = 8
    probe_tol: Optional[float] = None
    scan: bool = False
    dedup_radius: Optional[float] = None


@dataclass(frozen=True)
class HarnessConfig:
    runs: int = 30
    replicates: int = 30


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec
    n: int
    seed: int
    space: SearchSpace
    ga: GaConfig
    hybrid: Optional[HybridConfig] = None
    landscape: LandscapeConfig = field(default_factory=LandscapeConfig)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    version: int = SCHEMA_VERSION

    def benchmark(self, process=None) -> BenchmarkFunction:
        """The problem as a benchmark-shaped object; external problems need a running ``process``."""
        if self.problem.command is None:
            bench = get_benchmark(self.problem.name, self.n)
            return replace(bench, space=self.space)
        if process is None:
            raise ValueError("external problems need a running process")
        return BenchmarkFunction("external", self.n, self.space, process, self.problem.f_opt, None)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed, ga=self.ga.with_seed(seed))


# ---------------------------------------------------------------------------
# Field checking
# ---------------------------------------------------------------------------

def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigError("must be an object", where or "<root>")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        path = f"{where}.{unknown[0]}" if where else unknown[0]
        raise ConfigError(f"unknown key (allowed: {', '.join(sorted(allowed))})", path)


def _int(v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"must be an integer, got {v!r}", path)
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", path)
    return v


def _float(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"must be a number, got {v!r}", path)
    return float(v)


def _str(v, path, choices=None):
    if not isinstance(v, str):
        raise ConfigError(f"must be a string, got {v!r}", path)
    if choices is not None and v not in choices:
        raise ConfigError(f"must be one of {tuple(choices)}, got {v!r}", path)
    return v


def _bool(v, path):
    if not isinstance(v, bool):
        raise ConfigError(f"must be true or false, got {v!r}", path)
    return v


def _opt(kind):
    def check(v, path, *args):
        return None if v is None else kind(v, path, *args)
    return check


def _vector(v, n, path):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [float(v)] * n
    if not isinstance(v, list) or len(v) != n:
        raise ConfigError(f"must be a number or a list of {n} numbers", path)
    return [_float(x, f"{path}[{k}]") for k, x in enumerate(v)]


def _section(doc, where, spec):
    """Typecheck ``doc`` against ``{key: checker}``; absent keys are omitted."""
    doc = {} if doc is None else doc
    _check_keys(doc, spec, where)
    return {k: spec[k](v, f"{where}.{k}") for k, v in doc.items()}


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

_GA_KEYS = {
    "pop_size": lambda v, p: _int(v, p),
    "encoding": lambda v, p: _str(v, p, ("real", "binary")),
    "bits_per_variable": lambda v, p: _int(v, p),
    "pc": _float, "pm": _float, "sigma_rel": _float, "gamma": _float,
    "elitism_k": lambda v, p: _int(v, p),
    "selection": lambda v, p: _str(v, p, ("tournament", "rank")),
    "tournament_size": lambda v, p: _int(v, p),
    "max_generations": lambda v, p: _int(v, p),
    "max_evaluations": _opt(_int),
    "stagnation_window": _opt(_int),
    "stagnation_eps": _float,
    "seed_regions": lambda v, p: v,
}


def _seed_regions(raw, n):
    if not isinstance(raw, list):
        raise ConfigError("must be a list", "ga.seed_regions")
    regions = []
    for k, item in enumerate(raw):
        where = f"ga.seed_regions[{k}]"
        _check_keys(item, ("lower", "upper", "fraction"), where)
        if set(item) != {"lower", "upper", "fraction"}:
            raise ConfigError("needs lower, upper and fraction", where)
        regions.append(SeedRegion(tuple(_vector(item["lower"], n, f"{where}.lower")),
                                  tuple(_vector(item["upper"], n, f"{where}.upper")),
                                  _float(item["fraction"], f"{where}.fraction")))
    return tuple(regions)


def _ga(doc, n, seed) -> GaConfig:
    g = _section(doc, "ga", _GA_KEYS)
    encoding = g.get("encoding", "real")
    bits = g.get("bits_per_variable", 16)
    if bits < 1:
        raise ConfigError("must be >= 1", "ga.bits_per_variable")
    base = default_config(n, encoding, bits, seed)
    variation = VariationConfig(
        pc=g.get("pc", base.variation.pc),
        pm=g.get("pm", base.variation.pm),
        sigma_rel=g.get("sigma_rel", base.variation.sigma_rel),
        gamma=g.get("gamma", base.variation.gamma),
    )
    stop = base.stopping
    stopping = StoppingRule(
        max_generations=g.get("max_generations", stop.max_generations),
        max_evaluations=g.get("max_evaluations", stop.max_evaluations),
        stagnation_window=g.get("stagnation_window", stop.stagnation_window),
        stagnation_eps=g.get("stagnation_eps", stop.stagnation_eps),
    )
    return GaConfig(
        pop_size=g.get("pop_size", base.pop_size),
        encoding=encoding,
        bits_per_variable=bits,
        variation=variation,
        elitism_k=g.get("elitism_k", base.elitism_k),
        selection=g.get("selection", base.selection),
        tournament_size=g.get("tournament_size", base.tournament_size),
        stopping=stopping,
        seed=seed,
        seed_regions=_seed_regions(g.get("seed_regions", []), n),
    )


_SA_KEYS = {"T0": _float, "beta": _float, "steps_per_temperature": _int, "total_steps": _int, "sigma_rel": _float}
_HC_KEYS = {"step": _float, "shrink": _float, "max_iterations": _int, "tolerance": _float}
_HYBRID_KEYS = {
    "mode": lambda v, p: _str(v, p, ("lamarckian", "baldwinian", "mixed")),
    "lamarckian_fraction": _float,
    "searcher": lambda v, p: _str(v, p, ("sa", "hill_climb")),
    "placement": lambda v, p: _str(v, p, ("post", "interleaved")),
    "top_k": _int,
    "probability": _float,
    "sa": lambda v, p: _section(v, p, _SA_KEYS),
    "hill_climb": lambda v, p: _section(v, p, _HC_KEYS),
}


def _hybrid(doc, pop_size) -> HybridConfig:
    h = _section(doc, "hybrid", _HYBRID_KEYS)
    sa = SaSchedule(**h.pop("sa", {}))
    hc = HillClimbConfig(**h.pop("hill_climb", {}))
    cfg = HybridConfig(sa=sa, hill_climb=hc, **h)
    if cfg.top_k > pop_size:
        raise ConfigError(f"must be <= ga.pop_size ({pop_size})", "hybrid.top_k")
    return cfg


_LANDSCAPE_KEYS = {
    "lhs_samples": lambda v, p: _int(v, p, 1),
    "slice_i": _opt(_int), "slice_j": _opt(_int),
    "slice_resolution": lambda v, p: _int(v, p, 2),
    "base": lambda v, p: v,
    "probe_trials": lambda v, p: _int(v, p, 1),
    "probe_tol": _opt(_float),
    "scan": lambda v, p: _bool(v, p),
    "dedup_radius": _opt(_float),
}


def _landscape(doc, space) -> LandscapeConfig:
    d = _section(doc, "landscape", _LANDSCAPE_KEYS)
    if d.get("base") is not None:
        d["base"] = tuple(_vector(d["base"], space.n, "landscape.base"))
        if not space.contains(d["base"]):
            raise ConfigError("must lie inside the search space", "landscape.base")
    for key in ("slice_i", "slice_j"):
        if d.get(key) is not None and not 0 <= d[key] < space.n:
            raise ConfigError(f"must lie in 0..{space.n - 1}", f"landscape.{key}")
    cfg = LandscapeConfig(**d)
    if cfg.slice_i is not None and cfg.slice_i == cfg.slice_j:
        raise ConfigError("must differ from slice_i", "landscape.slice_j")
    if cfg.probe_tol is not None and not cfg.probe_tol > 0:
        raise ConfigError("must be > 0", "landscape.probe_tol")
    return cfg


def _problem(raw) -> ProblemSpec:
    if isinstance(raw, str):
        if raw not in BENCHMARK_NAMES:
            raise ConfigError(f"unknown builtin {raw!r}; choose from {BENCHMARK_NAMES}", "problem")
        return ProblemSpec(name=raw)
    if isinstance(raw, dict):
        _check_keys(raw, ("name", "command", "f_opt"), "problem")
        if "name" in raw:
            if set(raw) != {"name"}:
                raise ConfigError("give either a builtin name or a command", "problem")
            return _problem(raw["name"])
        cmd = raw.get("command")
        if not isinstance(cmd, list) or not cmd or not all(isinstance(c, str) for c in cmd):
            raise ConfigError("must be a non-empty list of strings", "problem.command")
        f_opt = raw.get("f_opt")
        return ProblemSpec(command=tuple(cmd), f_opt=None if f_opt is None else _float(f_opt, "problem.f_opt"))
    raise ConfigError("must be a builtin name or an object", "problem")


def _space(raw, problem: ProblemSpec, n: int) -> SearchSpace:
    if raw is None:
        if problem.command is not None:
            raise ConfigError("external problems need explicit bounds", "space")
        return get_benchmark(problem.name, n).space
    _check_keys(raw, ("lower", "upper"), "space")
    if set(raw) != {"lower", "upper"}:
        raise ConfigError("needs both lower and upper", "space")
    return SearchSpace(np.array(_vector(raw["lower"], n, "space.lower")),
                       np.array(_vector(raw["upper"], n, "space.upper")))


_TOP_KEYS = ("version", "problem", "n", "seed", "space", "ga", "hybrid", "landscape", "harness", "output")


def parse_config(doc: dict, seed: Optional[int] = None) -> RunConfig:
    """Validate a decoded configuration document.

    ``seed`` overrides the document's seed; without either, the
    ``EVOSCHEME_SEED`` environment variable is consulted, then 0.
    """
    _check_keys(doc, _TOP_KEYS, "")
    if "version" not in doc:
        raise ConfigError("schema version is required", "version")
    if doc["version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {doc['version']!r}", "version")
    if "problem" not in doc:
        raise ConfigError("is required", "problem")
    problem = _problem(doc["problem"])
    if "n" not in doc:
        raise ConfigError("is required", "n")
    n = _int(doc["n"], "n", 1)
    if problem.name == "rosenbrock" and n < 2:
        raise ConfigError("rosenbrock needs n >= 2", "n")
    if seed is None:
        if doc.get("seed") is not None:
            seed = _int(doc["seed"], "seed", 0)
        elif os.environ.get(SEED_ENV):
            try:
                seed = int(os.environ[SEED_ENV])
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer", SEED_ENV) from None
        else:
            seed = 0
    if not 0 <= seed < 2**64:
        raise ConfigError("must be an unsigned 64-bit integer", "seed")
    space = _space(doc.get("space"), problem, n)
    ga = _ga(doc.get("ga"), n, seed)
    hybrid = None if doc.get("hybrid") is None else _hybrid(doc["hybrid"], ga.pop_size)
    landscape = _landscape(doc.get("landscape"), space)
    h = _section(doc.get("harness"), "harness", {"runs": lambda v, p: _int(v, p, 1),
                                                   "replicates": lambda v, p: _int(v, p, 1)})
    o = _section(doc.get("output"), "output", {
        "directory": _str,
        "formats": lambda v, p: v,
    })
    formats = o.get("formats", ["csv", "json"])
    if not isinstance(formats, list) or not set(formats) <= {"csv", "json"}:
        raise ConfigError("must be a list drawn from ['csv', 'json']", "output.formats")
    output = OutputConfig(o.get("directory", "out"), tuple(formats))
    return RunConfig(problem, n, seed, space, ga, hybrid, landscape, HarnessConfig(**h), output)


def load_config(path, seed: Optional[int] = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_config(doc, seed)


def resolve(cfg: RunConfig) -> dict:
    """Fully expanded document for ``cfg``; feeding it back to :func:`parse_config` gives ``cfg``."""
    ga = cfg.ga
    doc = {
        "version": cfg.version,
        "problem": cfg.problem.to_json(),
        "n": cfg.n,
        "seed": cfg.seed,
        "space": {"lower": cfg.space.lower.tolist(), "upper": cfg.space.upper.tolist()},
        "ga": {
            "pop_size": ga.pop_size,
            "encoding": ga.encoding,
            "bits_per_variable": ga.bits_per_variable,
            "pc": ga.variation.pc,
            "pm": ga.variation.pm,
            "sigma_rel": ga.variation.sigma_rel,
            "gamma": ga.variation.gamma,
            "elitism_k": ga.elitism_k,
            "selection": ga.selection,
            "tournament_size": ga.tournament_size,
            "max_generations": ga.stopping.max_generations,
            "max_evaluations": ga.stopping.max_evaluations,
            "stagnation_window": ga.stopping.stagnation_window,
            "stagnation_eps": ga.stopping.stagnation_eps,
            "seed_regions": [{"lower": list(r.lower), "upper": list(r.upper), "fraction": r.fraction}
                             for r in ga.seed_regions],
        },
        "landscape": {f.name: (list(v) if isinstance(v := getattr(cfg.landscape, f.name), tuple) else v)
                      for f in fields(LandscapeConfig)},
        "harness": {"runs": cfg.harness.runs, "replicates": cfg.harness.replicates},
        "output": {"directory": cfg.output.directory, "formats": list(cfg.output.formats)},
    }
    if cfg.hybrid is not None:
        h = cfg.hybrid
        doc["hybrid"] = {
            "mode": h.mode, "lamarckian_fraction": h.lamarckian_fraction, "searcher": h.searcher,
            "placement": h.placement, "top_k": h.top_k, "probability": h.probability,
            "sa": {f.name: getattr(h.sa, f.name) for f in fields(SaSchedule)},
            "hill_climb": {f.name: getattr(h.hill_climb, f.name) for f in fields(HillClimbConfig)},
        }
    return doc
