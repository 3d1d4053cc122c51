"""Time the leapfrog stencil with the numba and numpy backends.

    python benchmarks/bench_kernels.py --n 64 128 --steps 20

Both backends run on the same random state; the script checks that they
agree before printing timings.
"""

import argparse
import time

import numpy as np

from elasto import _kernels


def run(backend, n, steps, seed=0):
    rng = np.random.default_rng(seed)
    shape = (3, n + 1, n + 1, n + 1)
    prev, cur = rng.normal(size=shape), rng.normal(size=shape)
    nxt = np.zeros(shape)
    F = np.zeros(shape)
    h = 8.0 / n
    dt = 0.9 * h / (np.sqrt(3.0) * np.sqrt(3.0))
    t0 = time.perf_counter()
    for _ in range(steps):
        _kernels.leapfrog_step(prev, cur, nxt, F, 1.0, 1.0, 1.0, h, dt, backend=backend)
        prev, cur, nxt = cur, nxt, prev
    return time.perf_counter() - t0, cur


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[32, 64, 128])
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args(argv)

    run("numba", 4, 1)  # compile outside the timed region
    print(f"{'n':>5} {'numpy [s/step]':>15} {'numba [s/step]':>15} {'speedup':>8}")
    for n in args.n:
        best = {}
        for backend in ("numpy", "numba"):
            times = []
            for _ in range(args.repeats):
                dt, final = run(backend, n, args.steps)
                times.append(dt / args.steps)
            best[backend] = (min(times), final)
        a, b = best["numpy"][1], best["numba"][1]
        gap = np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a)))
        if gap > 1e-10:
            raise SystemExit(f"backends disagree at n={n}: relative gap {gap:.2e}")
        tn, tb = best["numpy"][0], best["numba"][0]
        print(f"{n:>5} {tn:>15.5f} {tb:>15.5f} {tn / tb:>7.1f}x")


if __name__ == "__main__":
    main()
