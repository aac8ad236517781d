"""Time each sieve/fourier kernel on its numba and numpy paths.

    python benchmarks/bench_kernels.py [--repeat 3]

The numba timing excludes the first (compiling) call.
"""

import argparse
import math
import time

import numpy as np

from digitprimes import arith, kernels
from digitprimes._accel import HAVE_NUMBA
from digitprimes.digits import member_array


def _cases():
    x = 10**6
    ells = member_array(math.isqrt(x), {7}).astype(np.int64)
    ells = ells[(ells % 2 != 0) & (ells % 3 != 0) & (ells % 5 != 0)]
    isp = arith.prime_sieve(x)
    pv, pl = arith.proper_prime_powers(x)
    n = 200_000
    rng = np.random.default_rng(0)
    dv = np.arange(1, 1001, dtype=np.int64)
    coef = rng.normal(size=dv.size)
    g = rng.normal(size=n + 1)
    a = rng.normal(size=n + 1)
    members = member_array(10**5 - 1, {0, 5}).astype(np.uint64)
    phases = rng.integers(0, 2**63, 20, dtype=np.uint64) * np.uint64(2)
    return {
        "lattice_counts": (ells, x),
        "lattice_lambda": (ells, x, isp, pv, pl),
        "mobius": (10**6,),
        "divisor_accumulate": (dv, coef, g, n),
        "conv_dot": (dv, coef, g, a),
        "direct_sums": (members, phases),
    }


def _best(f, args, repeat):
    out = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        f(*args)
        out = min(out, time.perf_counter() - t)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<20} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, call in _cases().items():
        np_f = getattr(kernels, f"_{name}_np")
        t_np = _best(np_f, call, args.repeat)
        if HAVE_NUMBA:
            nb_f = getattr(kernels, f"_{name}_nb")
            nb_f(*call)
            t_nb = _best(nb_f, call, args.repeat)
            print(f"{name:<20} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}")
        else:
            print(f"{name:<20} {t_np:>10.4f} {'n/a':>10} {'':>8}")


if __name__ == "__main__":
    main()
