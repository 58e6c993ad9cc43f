"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same integer tables with both backends; the results
are compared before timing so a speedup never hides a disagreement.
"""
import argparse
import timeit

import numpy as np

from strata import _kernels_py as py
from strata.fincat import cyclic_group, indiscrete, poset_category

try:
    from strata import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def _categories():
    chain = [f"c{i:02d}" for i in range(24)]
    yield "Z/48", cyclic_group(48)
    yield "indiscrete(10)", indiscrete([f"o{i}" for i in range(10)])
    yield "chain(24)", poset_category(chain, [(a, b) for i, a in enumerate(chain) for b in chain[i + 1:]])


def _cases():
    rng = np.random.default_rng(0)
    for name, c in _categories():
        ix = c.index()
        yield f"assoc {name}", "assoc_violations", (ix.table, ix.out_offsets, ix.out_items, ix.dst)
        ident = np.arange(len(c.morphisms), dtype=np.int32)
        yield (f"functor id {name}", "functor_violations",
               (ix.table, ix.out_offsets, ix.out_items, ix.dst, ident, ix.table))
        k = len(c.morphisms)
        rand = lambda n: rng.integers(k, size=n).astype(np.int32)  # noqa: E731
        yield (f"naturality {name}", "naturality_violations",
               (ix.src, ix.dst, rand(k), rand(k), rand(len(c.objects)), ix.table))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return
    print(f"{'case':32s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for label, fn, argv in _cases():
        a, b = getattr(py, fn), getattr(compiled, fn)
        assert sorted(a(*argv)) == sorted(b(*argv)), label
        tp = min(timeit.repeat(lambda: a(*argv), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: b(*argv), number=1, repeat=args.repeat)) * 1e3
        print(f"{label:32s} {tp:10.2f} {tc:10.2f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
