"""Time the compiled and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import itertools
import math
import timeit

import numpy as np

from permfix import blocksys, kernels


def workloads(rng):
    perms_mc = np.stack([rng.permutation(40) for _ in range(20_000)])
    perms_s8 = np.array(list(itertools.permutations(range(8))), dtype=np.int64)
    systems = list(blocksys.block_partitions(8, 2))
    labels = np.zeros((len(systems), 8), dtype=np.int64)
    for i, blocks in enumerate(systems):
        for b, block in enumerate(blocks):
            labels[i, [x - 1 for x in block]] = b
    base = np.stack([rng.permutation(10) for _ in range(4)])
    sigma = rng.permutation(4)
    img = rng.permutation(1_000_000)
    return {
        "cycle_type_rows (20000 x S_40)": lambda k: k.cycle_type_rows(perms_mc),
        "preserves_any_partition (S_8, nu=2)": lambda k: k.preserves_any_partition(perms_s8, labels, 2),
        "product_action (10^4 points)": lambda k: k.product_action(base, sigma),
        "count_cycles (10^6 points)": lambda k: k.count_cycles(img),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.backends()
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s}" + "".join(f"{name:>12s}" for name in backends) + f"{'speedup':>10s}")
    for label, fn in workloads(rng).items():
        times = {}
        for name, mod in backends.items():
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speedup = times["python"] / times["cython"] if "cython" in times else math.nan
        print(f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values()) + f"{speedup:9.1f}x")


if __name__ == "__main__":
    main()
