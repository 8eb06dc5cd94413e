"""CSV and JSON writers for traces, designs and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import RunTrace

TRACE_HEADER = ("generation", "best_fitness", "mean_fitness", "std_fitness", "cumulative_evaluations")


def format_number(v) -> str:
    """Positional decimal with 17 significant digits, trailing zeros trimmed."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return np.format_float_positional(float(v), precision=17, unique=False, fractional=False, trim="-")


def _write_rows(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    return path


def write_trace_csv(trace: RunTrace, path):
    rows = ((r.generation, r.best_fitness, r.mean_fitness, r.std_fitness, r.cumulative_evaluations)
            for r in trace.records)
    return _write_rows(path, TRACE_HEADER, rows)


def read_trace_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return [
            {k: (int(v) if k in ("generation", "cumulative_evaluations") else float(v)) for k, v in row.items()}
            for row in csv.DictReader(fh)
        ]


def write_lhs_csv(design, path):
    n = design.points.shape[1]
    header = [f"x{i + 1}" for i in range(n)] + ["fitness"]
    rows = (list(p) + [f] for p, f in zip(design.points, design.fitness))
    return _write_rows(path, header, rows)


def write_slice_csv(grid, path):
    header = (f"x{grid.i + 1}", f"x{grid.j + 1}", "fitness")
    return _write_rows(path, header, grid.rows())


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(data, path):
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, default=_plain) + "\n")
    return path


def best_solution_dict(trace: RunTrace) -> dict:
    return {
        "phenotype": [float(v) for v in trace.best.phenotype],
        "fitness": float(trace.best.fitness),
        "evaluations": int(trace.evaluations),
        "local_search_evaluations": int(trace.local_search_evaluations),
        "generations": trace.generations,
        "stop_reason": trace.stop_reason,
        "seed": trace.seed,
    }
