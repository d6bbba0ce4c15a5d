"""Benchmark the compiled kernels against the numpy fallback on the
bundled-scenario problem size (162k grid nodes, 132 mixture sites, 5 agents).

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vorocover._kernels import _py

try:
    from vorocover._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--nodes", type=int, default=90 * 90 * 20)
    parser.add_argument("--sites", type=int, default=132)
    parser.add_argument("--agents", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    nodes = np.ascontiguousarray(rng.uniform(0, 180, size=(args.nodes, 3)))
    nodes[:, 2] *= 40.0 / 180.0
    positions = np.ascontiguousarray(rng.uniform(20, 160, size=(args.agents, 3)))
    sites = np.ascontiguousarray(rng.uniform(10, 170, size=(args.sites, 3)))

    backends = {"python": _py}
    if _core is not None:
        backends["c"] = _core
    else:
        print("note: compiled kernels not built; benchmarking fallback only")

    results = {}
    for name, impl in backends.items():
        t_mix, phi = timeit(
            lambda impl=impl: impl.gaussian_mixture(nodes, sites, 1.0, 0.0075),
            args.repeat)
        t_own, owner = timeit(
            lambda impl=impl: impl.ownership(nodes, positions), args.repeat)
        t_mom, moments = timeit(
            lambda impl=impl, phi=phi, owner=owner: [
                impl.owned_moments(nodes, owner, phi, i, positions[i])
                for i in range(args.agents)],
            args.repeat)
        results[name] = dict(mixture=t_mix, ownership=t_own, moments=t_mom,
                             phi=phi, owner=owner, mom=moments)
        print(f"{name:>7}: mixture {t_mix * 1e3:8.1f} ms   "
              f"ownership {t_own * 1e3:7.1f} ms   moments {t_mom * 1e3:7.1f} ms")

    if len(results) == 2:
        a, b = results["python"], results["c"]
        print(f"speedup: mixture x{a['mixture'] / b['mixture']:.1f}, "
              f"ownership x{a['ownership'] / b['ownership']:.1f}, "
              f"moments x{a['moments'] / b['moments']:.1f}")
        dev = float(np.max(np.abs(a["phi"] - b["phi"])
                           / np.maximum(np.abs(a["phi"]), 1e-300)))
        same_owner = bool(np.array_equal(a["owner"], b["owner"]))
        mom_dev = max(
            abs(x - y) / max(abs(x), 1e-300)
            for ma, mb in zip(a["mom"], b["mom"]) for x, y in zip(ma, mb))
        print(f"agreement: owner identical={same_owner}, "
              f"max mixture rel dev={dev:.2e}, max moment rel dev={mom_dev:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
