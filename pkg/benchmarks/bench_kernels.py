"""Compare the numba and pure-numpy paths of the hot kernels.

    python3 benchmarks/bench_kernels.py            # per-kernel table
    python3 benchmarks/bench_kernels.py --steps 200  # plus whole relaxation steps

The per-kernel table calls both implementations directly.  The whole-step
timing runs the solver twice in subprocesses, once with
TDQMC_DISABLE_NUMBA=1, since the flag is read at import.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from tdqmc import _kernels
from tdqmc.grid import Grid


def best_of(fn, repeat=5):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_cases(rng):
    g1, g2 = Grid(8.0, 256), Grid(5.0, 64, 2)
    w1 = rng.normal(size=(2000, g1.points))
    i1 = np.arange(2000)
    p1 = rng.normal(0, 0.7, 2000)
    w2 = rng.normal(size=(1000, g2.points, g2.points))
    i2 = np.arange(1000)
    p2 = rng.normal(0, 0.7, (1000, 2))
    lo1, lo2 = -g1.half_extent, -g2.half_extent
    yield "probe 1D (2000 walkers, n=256)", (
        lambda: _kernels.probe_1d_numba(w1, i1, p1, lo1, g1.spacing),
        lambda: _kernels.probe_1d_numpy(w1, i1, p1, lo1, g1.spacing),
    )
    yield "probe 2D (1000 walkers, 64x64)", (
        lambda: _kernels.probe_2d_numba(w2, i2, p2, lo2, g2.spacing),
        lambda: _kernels.probe_2d_numpy(w2, i2, p2, lo2, g2.spacing),
    )
    c1 = g1.coords
    yield "pair field 1D (1000 x 256)", (
        lambda: _kernels.pair_field_numba(p1[:1000, None], c1, 3.0, 1.0),
        lambda: _kernels.pair_field_numpy(p1[:1000, None], c1, 3.0, 1.0),
    )
    c2 = g2.coords
    yield "pair field 2D (500 x 4096)", (
        lambda: _kernels.pair_field_numba(p2[:500], c2, 3.0, 1.0),
        lambda: _kernels.pair_field_numpy(p2[:500], c2, 3.0, 1.0),
    )


STEP_SNIPPET = """
import sys, time
from tdqmc import PhysicalParams, RunConfig, relax_ground_state
from tdqmc.grid import Grid
steps = int(sys.argv[1])
cfg = RunConfig(PhysicalParams(2, 1), Grid(8.0, 256), walkers=1000, dtau=10.0 / steps, steps=steps, alpha=1.2)
relax_ground_state(RunConfig(PhysicalParams(2, 1), Grid(8.0, 256), walkers=16, dtau=0.1, steps=100))
t = time.perf_counter()
relax_ground_state(cfg)
print((time.perf_counter() - t) / steps)
"""


def step_time(steps, disable):
    env = dict(os.environ, TDQMC_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", STEP_SNIPPET, str(steps)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=0, help="also time N=2 relaxation steps (0 = skip)")
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, (fast, slow) in kernel_cases(rng):
        a, b = best_of(fast), best_of(slow)
        print(f"{name:34s} {a * 1e3:10.2f} {b * 1e3:10.2f} {b / a:8.1f}")
    if args.steps:
        a, b = step_time(args.steps, False), step_time(args.steps, True)
        print(f"{'relaxation step 1D N=2 M=1000':34s} {a * 1e3:10.2f} {b * 1e3:10.2f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
