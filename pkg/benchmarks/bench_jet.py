"""Compare the compiled jet kernels with the numpy fallback.

Usage::

    python benchmarks/bench_jet.py [--repeat N] [--json]

Kernel rows time ``mul`` and ``compose`` directly on random buffers; the
``bianchi`` row times one full Bianchi residual on the sphere (depth-3
jets) by running the same workload in a subprocess per backend.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from parastruct import _jetkernel_py

try:
    from parastruct import _jetkernel
except ImportError:
    _jetkernel = None

WORKLOAD = """
import time
from parastruct.config import load_config
from parastruct.sampling import random_vector_field, substream
from parastruct.structures import bianchi_residual
cfg = load_config("sphere_lc")
rng = substream(0, "bench", 0)
vs = [random_vector_field(2, rng) for _ in range(4)]
t = time.perf_counter()
for _ in range({repeat}):
    bianchi_residual(cfg.connection, *vs, (1.1, 0.4))
print((time.perf_counter() - t) / {repeat})
"""


def _kernel_rows(repeat: int):
    rng = np.random.default_rng(0)
    rows = []
    for n, d in [(2, 1), (2, 2), (2, 3), (3, 3), (4, 3)]:
        size = (n + 1) ** d
        a, b = rng.standard_normal(size), rng.standard_normal(size)
        taylor = rng.standard_normal(d + 1)
        for op in ("mul", "compose"):
            timings = {}
            for name, mod in (("compiled", _jetkernel), ("python", _jetkernel_py)):
                if mod is None:
                    continue
                if op == "mul":
                    call = lambda m=mod: m.mul(a, d, b, d, n)  # noqa: E731
                else:
                    call = lambda m=mod: m.compose(a, d, taylor, n)  # noqa: E731
                timings[name] = min(timeit.repeat(call, number=repeat, repeat=3)) / repeat
            rows.append({"case": f"{op} n={n} depth={d}", **timings})
    return rows


def _workload_row(repeat: int):
    timings = {}
    for name in ("compiled", "python"):
        if name == "compiled" and _jetkernel is None:
            continue
        env = dict(os.environ, PARASTRUCT_BACKEND=name)
        out = subprocess.run([sys.executable, "-c", WORKLOAD.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True)
        timings[name] = float(out.stdout)
    return {"case": "bianchi residual, sphere", **timings}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000, help="kernel calls per timing")
    parser.add_argument("--json", action="store_true", help="print rows as JSON")
    args = parser.parse_args(argv)

    rows = _kernel_rows(args.repeat) + [_workload_row(max(1, args.repeat // 400))]
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    print(f"{'case':<28} {'compiled':>12} {'python':>12} {'speedup':>8}")
    for row in rows:
        c, p = row.get("compiled"), row["python"]
        cs = f"{c * 1e6:10.2f}us" if c is not None else f"{'-':>12}"
        sp = f"{p / c:7.1f}x" if c else f"{'-':>8}"
        print(f"{row['case']:<28} {cs} {p * 1e6:10.2f}us {sp}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
