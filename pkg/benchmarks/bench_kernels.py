"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--gen 6] [--repeat 3]
"""
import argparse
import time

import numpy as np

from fracsob import kernels
from fracsob.generators import vicsek
from fracsob.inequalities import path_kernel_k


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--gen", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    model = vicsek(2, args.gen)
    g = model.graph
    members, _ = model.central_block(args.gen - 2)
    centers = members[:: max(1, len(members) // 200)]
    values = np.stack([g.measure, np.cos(np.arange(g.vertex_count))])
    weights = np.ones(len(members[:400]))

    cases = {
        "bfs_distances (all)": lambda k: k.bfs_distances(g.indptr, g.indices, np.array([model.center]), -1),
        "ball_sums r=9": lambda k: k.ball_sums(g.indptr, g.indices, centers, 9, values),
        "pair_distance_sum 400": lambda k: k.pair_distance_sum(
            g.indptr, g.indices, members[:400], weights, 1.5, g.vertex_count
        ),
    }
    print(f"vicsek(2, {args.gen}): {g.vertex_count} vertices, backends {sorted(kernels.BACKENDS)}")
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in kernels.BACKENDS) + f"{'speedup':>10}")
    for label, case in cases.items():
        row, results = [], []
        for name, impl in kernels.BACKENDS.items():
            seconds, out = best_of(lambda: case(impl), args.repeat)
            row.append(seconds)
            results.append(out)
        for other in results[1:]:
            a = results[0][0] if isinstance(results[0], tuple) else results[0]
            b = other[0] if isinstance(other, tuple) else other
            np.testing.assert_allclose(a, b, rtol=1e-12, equal_nan=False)
        speedup = row[0] / row[-1] if len(row) > 1 else 1.0
        print(f"{label:<24}" + "".join(f"{s:12.4f}" for s in row) + f"{speedup:9.1f}x")

    t, k = best_of(lambda: path_kernel_k(g, model.center, 9, 2.0), args.repeat)
    print(f"path_kernel_k n=9 via {kernels.BACKEND}: {t:.4f}s (K={k:.6g})")


if __name__ == "__main__":
    main()
