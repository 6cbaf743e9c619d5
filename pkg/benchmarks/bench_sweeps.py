"""Compare the compiled Gauss-Seidel kernel against the scipy fallback.

Builds the default system at a chosen level and times symmetric sweep
pairs through both backends.  Run:

    python3 benchmarks/bench_sweeps.py [--level 4] [--repeats 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wgfem import (CoefficientField, SpaceConfig, assemble_system,
                   build_dofmap, build_hierarchy)
from wgfem import sweeps as sweeps_mod
from wgfem._sweeps_fallback import SweepKernel


def _time_pairs(forward, backward, n: int, repeats: int) -> float:
    rng = np.random.default_rng(0)
    b = rng.standard_normal(n)
    x = np.zeros(n)
    t0 = time.perf_counter()
    for _ in range(repeats):
        forward(x, b)
        backward(x, b)
    return (time.perf_counter() - t0) / repeats


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--level", type=int, default=4)
    parser.add_argument("--family", default="type2")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    mesh = build_hierarchy("criss-cross", 2, args.level)[-1]
    config = SpaceConfig(args.family)
    dofmap = build_dofmap(mesh, config)
    system = assemble_system(mesh, dofmap, config,
                             CoefficientField.identity(mesh))
    a = system.a
    print(f"level {args.level}, {a.shape[0]} unknowns, {a.nnz} nonzeros")

    fallback = SweepKernel(a)
    t_py = _time_pairs(fallback.forward, fallback.backward, a.shape[0],
                       args.repeats)
    print(f"scipy fallback:    {1e3 * t_py:8.3f} ms per sweep pair")

    if sweeps_mod.BACKEND == "compiled":
        op = sweeps_mod.SweepOperator(a)
        t_c = _time_pairs(op.forward, op.backward, a.shape[0], args.repeats)
        print(f"compiled kernel:   {1e3 * t_c:8.3f} ms per sweep pair")
        print(f"speedup:           {t_py / t_c:8.1f}x")

        # agreement check: identical sweeps from identical states
        rng = np.random.default_rng(1)
        b = rng.standard_normal(a.shape[0])
        x1 = np.zeros_like(b)
        x2 = np.zeros_like(b)
        op.forward(x1, b)
        op.backward(x1, b)
        fallback.forward(x2, b)
        fallback.backward(x2, b)
        dev = np.abs(x1 - x2).max() / np.abs(x1).max()
        print(f"backend agreement: {dev:.2e} relative")
    else:
        print("compiled kernel unavailable (running under "
              "WGFEM_PURE_PYTHON=1?)")


if __name__ == "__main__":
    main()
