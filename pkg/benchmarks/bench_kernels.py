"""Compare the compiled and pure-Python RK4 kernels on one trajectory.

    python3 benchmarks/bench_kernels.py [--tmax 5] [--kappa 2]
"""

import argparse
import time

import numpy as np

from lossy_cavity import _backend, _kernels_py
from lossy_cavity.dynamics import integrate
from lossy_cavity.model import SystemParams


def timed(kernels, p, t_max, repeats):
    best, traj = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj = integrate(p, "eg1", t_max, kernels=kernels)
        best = min(best, time.perf_counter() - t0)
    return best, traj


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tmax", type=float, default=5.0)
    ap.add_argument("--kappa", type=float, default=2.0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    p = SystemParams.identical(5.0, args.kappa)
    t_py, tr_py = timed(_kernels_py, p, args.tmax, 1)
    print(f"python   {t_py:8.3f} s  (tmax={args.tmax:g}, kappa={args.kappa:g})")
    if _backend.compiled is None:
        print("compiled kernel not built; nothing to compare")
        return
    t_c, tr_c = timed(_backend.compiled, p, args.tmax, args.repeats)
    diff = np.max(np.abs(tr_c.y - tr_py.y))
    print(f"cython   {t_c:8.3f} s")
    print(f"speed-up {t_py / t_c:8.1f} x, max |difference| {diff:.1e}")


if __name__ == "__main__":
    main()
