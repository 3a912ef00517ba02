"""Compare the compiled and pure-Python integer kernels.

    python3 benchmarks/bench_kernel.py [--repeat 3]

Each workload runs once per backend through the backend module directly, and
once end to end (a wrapped-circle bar cohomology) with the backend swapped in.
"""

import argparse
import random
import time

from sheafmorse import kernel
from sheafmorse.acceptance import wrapped_circle_contexts
from sheafmorse.theatre import quotient_hom


def _dense(rng, m, n, density, coeff):
    return [[rng.randint(-coeff, coeff) if rng.random() < density else 0 for _ in range(n)] for _ in range(m)]


def _sparse_complex(rng, n, density):
    # a random acyclic-ish complex in degrees 0,1 with unit-heavy entries
    half = n // 2
    entries = {}
    for j in range(half):
        for i in range(half, n):
            if rng.random() < density:
                entries[(i, j)] = rng.choice([1, -1, 1, 2])
    return entries


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = random.Random(7)
    # sparse small-coefficient matrices, like real differentials; dense random ones overflow int64
    mats = [_dense(rng, 40, 40, 0.1, 2) for _ in range(20)]
    smats = [_sparse_complex(rng, 400, 0.01) for _ in range(5)]
    backends = kernel.backends()
    print(f"backends: {', '.join(backends)}")
    rows = []
    for name, mod in backends.items():
        t_snf = _time(lambda: [mod.snf_invariants([r[:] for r in A], 40, 40) for A in mats], args.repeat)
        t_elim = _time(lambda: [mod.eliminate_units(400, dict(E)) for E in smats], args.repeat)
        rows.append((name, t_snf, t_elim))

    saved = (kernel.snf_invariants, kernel.eliminate_units)
    for k, (name, mod) in enumerate(backends.items()):
        kernel.snf_invariants, kernel.eliminate_units = mod.snf_invariants, mod.eliminate_units
        ctx, e, _ = wrapped_circle_contexts()["coarse"]  # fresh hom cache per backend
        t_bar = _time(lambda: quotient_hom(ctx, e, e, 4), 1)
        rows[k] = rows[k] + (t_bar,)
    kernel.snf_invariants, kernel.eliminate_units = saved

    print(f"{'backend':<10}{'snf 20x40x40':>16}{'elim 5x400':>14}{'bar circle N=4':>18}")
    for name, a, b, c in rows:
        print(f"{name:<10}{a:>15.4f}s{b:>13.4f}s{c:>17.4f}s")
    if len(rows) > 1:
        py, fast = rows[0], rows[1]
        print("speedup   " + "".join(f"{p / f:>15.1f}x" for p, f in zip(py[1:], fast[1:])))


if __name__ == "__main__":
    main()
