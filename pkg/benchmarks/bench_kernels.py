"""Compiled vs pure-Python table sweeps.

    python benchmarks/bench_kernels.py --n 2000 5000 --shapes random path --repeat 3

Builds the mode engine over one shared structure with each backend and
prints the best-of-``repeat`` build time, the operation count and the speedup.
"""

import argparse
import math
import time

import numpy as np

from pathfreq import cli, kernels
from pathfreq.gvalue import make_mode_g
from pathfreq.subtask_engine import Engine, PathStructure


def best_build(ps, prefer_compiled, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        eng = Engine(ps, make_mode_g(ps.vf), prefer_compiled=prefer_compiled)
        times.append(time.perf_counter() - t0)
    return min(times), eng


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[1000, 5000])
    p.add_argument("--shapes", nargs="+", default=["random", "path", "caterpillar"],
                   choices=cli.SHAPES)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    if not kernels.COMPILED:
        print("compiled extension not built; only the pure-Python backend is available")
    print(f"{'shape':<12} {'n':>7} {'ops':>12} {'python_s':>9} {'cython_s':>9} {'speedup':>8}")
    for shape in args.shapes:
        for n in args.n:
            tree = cli.generate(n, args.seed, max(1, math.isqrt(n)), shape, False)
            ps = PathStructure(tree)
            slow, ref = best_build(ps, False, args.repeat)
            if kernels.COMPILED:
                fast, eng = best_build(ps, True, args.repeat)
                same = all(np.array_equal(getattr(eng, t), getattr(ref, t))
                           for t in ("T1", "T2", "T3", "T5"))
                if not same:
                    raise SystemExit(f"backends disagree on {shape} n={n}")
                cols = f"{fast:>9.3f} {slow / fast:>7.1f}x"
            else:
                cols = f"{'-':>9} {'-':>8}"
            print(f"{shape:<12} {n:>7} {ref.build_ops:>12} {slow:>9.3f} {cols}")


if __name__ == "__main__":
    main()
