#!/usr/bin/env python3
"""Benchmark the compiled scan kernels against the pure-Python fallback.

Generates a uniform random network, then times window retrieval and window
statistics for both kernel backends on identical inputs, verifying they
produce identical outputs along the way.

Usage:
    python3 benchmarks/bench_kernels.py --nodes 20000 --edges 100000 --radius 1000
"""

import argparse
import sys
import time

import numpy as np

from ssnscan._kernels import build_grid, load_backend
from ssnscan.model import NeighborhoodSpec
from ssnscan.scan import scan
from ssnscan.spatial import PointIndex
from ssnscan.synth import uniform_random_network


def time_backend(impl, grid, net, centers, radius, k):
    timings = {}
    t0 = time.perf_counter()
    indptr, members = impl.radius_windows(grid, net.xs, net.ys, centers, radius, 0)
    timings["radius_windows"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    stats = impl.window_stats(indptr, members, net.adj_indptr, net.adj_indices, net.n)
    timings["window_stats"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    kip, kmem = impl.knn_windows(grid, net.xs, net.ys, net.id_rank, centers, k)
    timings["knn_windows"] = time.perf_counter() - t0
    return timings, (indptr, members, stats, kip, kmem)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--edges", type=int, default=100000)
    ap.add_argument("--extent", type=float, default=20000.0, help="square side, meters")
    ap.add_argument("--radius", type=float, default=1000.0)
    ap.add_argument("--k", type=int, default=15)
    ap.add_argument("--centers", type=int, default=0,
                    help="focal nodes to query (0 = all)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    net = uniform_random_network(args.nodes, args.edges,
                                 (0, 0, args.extent, args.extent), seed=args.seed)
    grid = build_grid(net.xs, net.ys)
    ncenters = args.centers or net.n
    centers = np.arange(ncenters, dtype=np.int64)

    backends = {}
    for name in ("cython", "python"):
        try:
            backends[name] = load_backend(name)
        except ImportError:
            print(f"backend {name!r} unavailable, skipping", file=sys.stderr)
    if not backends:
        sys.exit("no kernel backend available")

    print(f"n={net.n} e={net.e} centers={ncenters} radius={args.radius} k={args.k}")
    results = {}
    for name, impl in backends.items():
        timings, outputs = time_backend(impl, grid, net, centers, args.radius, args.k)
        results[name] = (timings, outputs)
        for op, dt in timings.items():
            print(f"  {name:>7} {op:<16} {dt * 1e3:10.1f} ms")

    if len(results) == 2:
        (_, out_cy), (_, out_py) = results["cython"], results["python"]
        same = (np.array_equal(out_cy[0], out_py[0])
                and np.array_equal(out_cy[1], out_py[1])
                and all(np.array_equal(a, b) for a, b in zip(out_cy[2], out_py[2]))
                and np.array_equal(out_cy[3], out_py[3])
                and np.array_equal(out_cy[4], out_py[4]))
        print(f"backends agree: {same}")
        if not same:
            sys.exit("backend outputs differ")
        t_cy, t_py = results["cython"][0], results["python"][0]
        for op in t_cy:
            if t_cy[op] > 0:
                print(f"  speedup {op:<16} {t_py[op] / t_cy[op]:8.1f}x")

    # end-to-end scan timing with the selected (default) backend
    index = PointIndex(net, backend="grid")
    t0 = time.perf_counter()
    scan(net, index, NeighborhoodSpec.euclidean(args.radius))
    print(f"end-to-end scan (selected backend): {(time.perf_counter() - t0) * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
