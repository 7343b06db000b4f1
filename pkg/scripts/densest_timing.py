"""Exhaustive enumeration vs parametric min cut for the densest-subset step.

Builds large tied classes (f in {0, 1}) on random hypergraphs, checks both
solvers return the same maximal set, and reports median wall time per size.

    python3 scripts/densest_timing.py --sizes 6 10 14 18
"""
import argparse
import time

import numpy as np

from hmd.diffusion import _class_instance, densest_subset, derivative
from hmd.generators import random_hypergraph


def instance(rng, k):
    while True:
        H = random_hypergraph(rng, n=k + 2, m=2 * k, max_edge=5)
        f = np.zeros(H.n)
        f[rng.choice(H.n, 2, replace=False)] = 1.0
        rep = derivative(H, f)
        U = max(rep.classes, key=len)
        if len(U) >= k:
            return _class_instance(H, U, range(H.m), rep.S_sets, rep.I_sets, rep.constants)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 10, 14, 18])
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'|U|':>4} {'enumerate ms':>13} {'mincut ms':>10} agree")
    for k in args.sizes:
        times = {"enumerate": [], "mincut": []}
        agree = True
        for _ in range(args.reps):
            inst = instance(rng, k)
            got = {}
            for method in times:
                t = time.perf_counter()
                got[method] = densest_subset(inst, method)
                times[method].append(1e3 * (time.perf_counter() - t))
            agree &= got["enumerate"][0] == got["mincut"][0]
        print(f"{k:4d} {np.median(times['enumerate']):13.2f} {np.median(times['mincut']):10.2f} {agree}")


if __name__ == "__main__":
    main()
