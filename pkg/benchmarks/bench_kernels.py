"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--full]

``--full`` adds the degree-1 span filter on sym:4 (2^24 candidates) to the
Python side, which takes minutes.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from boolmeasures import _pykernels as py
from boolmeasures.batch import all_functions, position_masks, random_functions
from boolmeasures.catalog import build
from boolmeasures.measures import _tile_arrays, annihilator, state_graph

try:
    from boolmeasures import _ckernels as cc
except ImportError:
    cc = None


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def int_annihilator(d, k):
    N = annihilator(d, k)
    if N.dtype == object:
        N = N.astype(np.int64).reshape(N.shape[0], d.size)
    return N


def cases(full: bool):
    """Yield (name, compiled thunk, python thunk or None)."""
    sym4 = build("sym:4")
    F = random_functions(sym4, 20_000, 0)
    arrays = state_graph(sym4).kernel_arrays()
    yield ("dt_depths sym:4 x20000",
           lambda: cc.dt_depths(*arrays, F), lambda: py.dt_depths(*arrays, F))

    pos = position_masks(sym4)
    yield ("block_keys sym:4 x20000",
           lambda: cc.block_keys(F, pos), lambda: py.block_keys(F, pos))

    rng = np.random.default_rng(1)
    masks = [sum(1 << int(e) for e in rng.choice(40, size=4, replace=False)) for _ in range(60)]
    yield ("max_packing 60 masks of 4", lambda: cc.max_packing(masks, None), lambda: py.max_packing(masks))

    ms = build("ms:2,2")
    ptr, links, sizes = _tile_arrays(ms)
    fs = [int(v) for v in all_functions(ms)]

    def partitions(kern):
        return lambda: [kern.partition_exists(ptr, links, sizes, fb, ms.all_points, k, None)
                        for fb in fs for k in range(ms.n + 1)]
    yield ("partition_exists ms:2,2 all", partitions(cc), partitions(py))

    for spec in ("pm:3,2", "cube:4"):
        d = build(spec)
        N = int_annihilator(d, 1)
        yield (f"span_filter {spec} deg<=1",
               lambda N=N, n=d.size: cc.span_filter(N, n), lambda N=N, n=d.size: py.span_filter(N, n))

    N4 = int_annihilator(sym4, 1)
    yield ("span_filter sym:4 deg<=1", lambda: cc.span_filter(N4, sym4.size),
           (lambda: py.span_filter(N4, sym4.size)) if full else None)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args(argv)
    if cc is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    print(f"{'kernel':34} {'compiled s':>11} {'python s':>11} {'speed-up':>9}")
    for name, fast, slow in cases(args.full):
        tc = best_of(fast, args.repeat)
        if slow is None:
            print(f"{name:34} {tc:11.4f} {'skipped':>11} {'':>9}")
            continue
        tp = best_of(slow, 1 if args.full else args.repeat)
        print(f"{name:34} {tc:11.4f} {tp:11.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
