"""
Optimizing an external program
==============================

The objective lives in a separate process that reads one point per line and
prints one fitness per line. Here the child is a tiny Python script, but any
simulator speaking the same protocol can be used.
"""

import sys
import tempfile
from pathlib import Path

from evoscheme import SearchSpace
from evoscheme.core import Objective
from evoscheme.engine import default_config, run_ga
from evoscheme.external import ExternalProcess

CHILD = """
import sys
for line in sys.stdin:
    x, y = map(float, line.split())
    print(-((x - 1) ** 2 + 10 * (y + 0.5) ** 2), flush=True)
"""

with tempfile.TemporaryDirectory() as tmp:
    script = Path(tmp) / "child.py"
    script.write_text(CHILD)
    space = SearchSpace.uniform(2, -3.0, 3.0)
    with ExternalProcess([sys.executable, str(script)]) as proc:
        obj = Objective(proc, 2, vectorized=True, name="child")
        trace = run_ga(obj, space, default_config(2, seed=5))

print(f"best {trace.best.fitness:.2e} at {trace.best.phenotype.round(4)}")
print(f"{trace.evaluations} evaluations sent to the child")

# the same setup from the command line:
#   {"version": 1, "problem": {"command": ["python3", "child.py"]}, "n": 2,
#    "space": {"lower": -3, "upper": 3}}
#   evoscheme run --config cfg.json --out out/
