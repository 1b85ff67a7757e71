"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import random
import time

import numpy as np

from resolvent import kernels
from resolvent._resolvent_table import RESOLVENT_TERMS


def _echelon_case(seed=0, nrows=600, ncols=400, nnz=6):
    rng = random.Random(seed)
    indptr, indices, data = [0], [], []
    for _ in range(nrows):
        cols = rng.sample(range(ncols), nnz)
        indices.extend(cols)
        data.extend(rng.randrange(1, 101) for _ in cols)
        indptr.append(len(indices))
    return (np.asarray(indptr, dtype=np.int64), np.asarray(indices, dtype=np.int64),
            np.asarray(data, dtype=np.int64), ncols, 1_000_003)


CASES = {
    "hist_range d=3 p=5 n=2 (390625 vectors)": lambda k: k.hist_range(3, 5, 2, 0, 5**8, RESOLVENT_TERMS),
    "hist_range d=4 p=5 n=1 (200000 vectors)": lambda k: k.hist_range(4, 5, 1, 0, 200_000, RESOLVENT_TERMS),
    "mc_hist d=4 p=5 n=2 (200000 samples)": lambda k: k.mc_hist(4, 5, 2, 200_000, 1, RESOLVENT_TERMS, 65536, 1),
    "echelon_mod_p 600x400": lambda k: k.echelon_mod_p(*_echelon_case()),
}


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    py = kernels.backend("python")
    try:
        cc = kernels.backend("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    print(f"{'kernel':<44}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    for name, fn in CASES.items():
        a = np.asarray(fn(py))
        b = np.asarray(fn(cc))
        if a.tolist() != b.tolist():
            raise SystemExit(f"backends disagree on {name}")
        tp, tc = best_of(lambda: fn(py), args.repeat), best_of(lambda: fn(cc), args.repeat)
        print(f"{name:<44}{tp:>11.3f}{tc:>12.4f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
