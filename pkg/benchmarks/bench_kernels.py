"""Compare the compiled kernels with their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from phantomrts import _core_py

try:
    from phantomrts import _core
except ImportError:
    _core = None


def cases(rng):
    """(name, args) per kernel at the sizes the solver and bots actually use."""
    cand = np.ascontiguousarray(rng.integers(0, 21, size=(144, 12)), dtype=np.int64)
    coef = np.ascontiguousarray(rng.integers(-3, 4, size=(5, 12)), dtype=np.float64)
    rhs = np.ascontiguousarray(rng.integers(0, 20, size=5), dtype=np.float64)
    kind = np.array([0, 2, 2, 2, 0], dtype=np.int32)
    assign = np.ascontiguousarray(rng.integers(0, 11, size=(144, 9)), dtype=np.int64)
    counters = np.ascontiguousarray(rng.uniform(0.1, 5.0, size=9))
    samples = np.ascontiguousarray(rng.integers(0, 10, size=(30, 3)), dtype=np.float64)
    weights = np.full(30, 1 / 30)
    grid = np.ascontiguousarray(rng.random((16, 16)) > 0.2, dtype=np.uint8)
    sources = np.array([[0, 0], [15, 15]], dtype=np.int64)
    return [
        ("linear_errors", (cand, coef, rhs, kind)),
        ("upp_rdu", (assign, counters, samples, weights)),
        ("distance_field", (grid, sources)),
    ]


def time_call(fn, args, repeat):
    t = timeit.Timer(lambda: fn(*args))
    n, _ = t.autorange()
    return min(t.repeat(repeat, n)) / n * 1e6


def decide_ms(pure: bool) -> float:
    """Median wall time of one k=30 production decision, in a fresh interpreter."""
    code = (
        "import random, statistics, time\n"
        "from phantomrts.upp import ProductionState, CounterMatrix, decide_production\n"
        "st = ProductionState(20, 3, (1, 1, 1), (2, 3, 2), CounterMatrix.default(), 20)\n"
        "s = lambda r: (r.randint(0, 6), r.randint(0, 6), r.randint(0, 6))\n"
        "ts = []\n"
        "for i in range(15):\n"
        "    t = time.perf_counter()\n"
        "    decide_production(st, s, k=30, budget_ms=None, rng=i, max_iterations=40)\n"
        "    ts.append((time.perf_counter() - t) * 1000)\n"
        "print(statistics.median(ts))\n"
    )
    env = dict(os.environ, PHANTOMRTS_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []
    for name, a in cases(rng):
        py = time_call(getattr(_core_py, name), a, args.repeat)
        c = time_call(getattr(_core, name), a, args.repeat) if _core is not None else float("nan")
        rows.append({"kernel": name, "python_us": py, "compiled_us": c, "speedup": py / c})
    rows.append({"kernel": "decide_production (40 iterations)", "python_us": decide_ms(True) * 1000,
                 "compiled_us": decide_ms(False) * 1000 if _core is not None else float("nan")})
    rows[-1]["speedup"] = rows[-1]["python_us"] / rows[-1]["compiled_us"]
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'kernel':36} {'python us':>12} {'compiled us':>12} {'speedup':>8}")
    for r in rows:
        print(f"{r['kernel']:36} {r['python_us']:12.1f} {r['compiled_us']:12.1f} {r['speedup']:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
