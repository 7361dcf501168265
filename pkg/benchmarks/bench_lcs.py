"""Compare the compiled LCS kernel against the pure-Python fallback.

Runs the same workload through both backends and reports per-pair timings
and the speedup. The compiled backend is skipped when the extension is not
built.

Usage: python3 benchmarks/bench_lcs.py [--pairs N] [--length L] [--vocab V]
"""

import argparse
import random
import time

import numpy as np

from tagcap.metrics import _backend
from tagcap.metrics import _kernels_py

try:
    from tagcap.metrics import _kernels
except ImportError:
    _kernels = None


def make_pairs(n_pairs, length, vocab, seed=0):
    rng = random.Random(seed)
    words = [f"w{i}" for i in range(vocab)]
    return [
        (
            [rng.choice(words) for _ in range(length)],
            [rng.choice(words) for _ in range(length)],
        )
        for _ in range(n_pairs)
    ]


def encode(a, b):
    ids = {}
    xa = np.fromiter((ids.setdefault(t, len(ids)) for t in a), dtype=np.int32, count=len(a))
    xb = np.fromiter((ids.setdefault(t, len(ids)) for t in b), dtype=np.int32, count=len(b))
    return xa, xb


def bench(fn, encoded, as_list):
    start = time.perf_counter()
    out = []
    for xa, xb in encoded:
        if as_list:
            out.append(fn(xa.tolist(), xb.tolist()))
        else:
            out.append(fn(xa, xb))
    return time.perf_counter() - start, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--length", type=int, default=300)
    parser.add_argument("--vocab", type=int, default=50)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.length, args.vocab)
    encoded = [encode(a, b) for a, b in pairs]
    print(f"workload: {args.pairs} pairs, length {args.length}, vocab {args.vocab}")
    print(f"active backend: {_backend.BACKEND_NAME}")

    t_py, out_py = bench(_kernels_py.lcs_length_ids, encoded, as_list=True)
    print(f"pure python : {t_py:8.3f}s total  {t_py / args.pairs * 1e3:8.3f} ms/pair")

    if _kernels is None:
        print("compiled    : extension not built; skipped")
        return

    t_cy, out_cy = bench(_kernels.lcs_length_ids, encoded, as_list=False)
    print(f"compiled    : {t_cy:8.3f}s total  {t_cy / args.pairs * 1e3:8.3f} ms/pair")
    assert out_py == out_cy, "backends disagree"
    print(f"speedup     : {t_py / t_cy:8.1f}x (results identical)")


if __name__ == "__main__":
    main()
