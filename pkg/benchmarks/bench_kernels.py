"""Time the graph kernels on both backends, plus a whole desk-scale evaluation.

    python benchmarks/bench_kernels.py [--sizes 50 200 800] [--repeat 5]

Numba timings exclude compilation; the one-off compile (or cache load) cost
is reported on its own line.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from ontocomplete import _kernels
from ontocomplete.octree import Phase, builtin_profiles, default_tree, evaluate
from ontocomplete.parser import parse_ontology

DESK = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "desk.ttl"


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernels(backend):
    if backend == "numba":
        return _kernels.closure_numba, _kernels.scc_numba, _kernels.intersection_closure_numba_sorted
    return _kernels.closure_numpy, _kernels.scc_numpy, _kernels.intersection_closure_numpy


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    if "numba" in backends:
        t0 = time.perf_counter()
        _kernels.USE_NUMBA = True
        _kernels.warmup()
        print(f"numba compile/cache load: {time.perf_counter() - t0:.2f} s")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>6}" + "".join(f"{b:>12}" for b in backends))
    for n in args.sizes:
        adj = rng.random((n, n)) < 2.0 / n
        bip = _kernels.pack_rows(rng.random((min(n, 64), 16)) < 0.5)
        inputs = {"transitive_closure": adj, "scc_labels": adj, "intersection_closure": bip}
        row = {name: [] for name in inputs}
        for backend in backends:
            for name, fn in zip(inputs, kernels(backend)):
                row[name].append(best_of(lambda: fn(inputs[name]), args.repeat))
        for name, times in row.items():
            print(f"{name:<22}{n:>6}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times))

    text = DESK.read_text(encoding="utf-8")
    tree = default_tree()
    profile = builtin_profiles(tree)[Phase.DETAIL_DESCRIPTION]
    for backend in backends:
        _kernels.USE_NUMBA = backend == "numba"
        t = best_of(lambda: evaluate(tree, profile, parse_ontology(text).ontology), args.repeat)
        print(f"desk.ttl parse+evaluate ({backend}): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
