"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per kernel and workload with the best-of-N time for each
backend and the speedup. End-to-end rows run encode and decode through
``lkss.leaky`` with the backend swapped in.
"""

from __future__ import annotations

import argparse
import timeit
from fractions import Fraction

import numpy as np

from lkss import _pykernels, kernels
from lkss.field import PrimeField
from lkss.leaky import SchemeParams, SeededSource, decode, encode, global_encoding_matrices, layout

try:
    from lkss import _ckernels
except ImportError:
    _ckernels = None


def best(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def _sparse(D, s):
    rows, cols = np.nonzero(D)
    ptr = np.searchsorted(rows, np.arange(D.shape[0] + 1)).astype(np.intp)
    return ptr, (cols // s).astype(np.intp), (cols % s).astype(np.intp), D[rows, cols].astype(np.uint64)


def workloads(rng):
    q = 65537
    M = rng.integers(0, q, (24, 18), dtype=np.uint64)
    X = rng.integers(0, q, (18, 20000), dtype=np.uint64)
    yield "matmul_mod 24x18 @ 18x20000", lambda k: k.matmul_mod(M, X, q)
    R = rng.integers(0, q, (60, 60), dtype=np.uint64)
    yield "rank_mod 60x60", lambda k: k.rank_mod(R, q)
    data = rng.bytes(1 << 20)
    buf = np.frombuffer(data, dtype=np.uint8)
    yield "bytes_to_symbols 1 MiB, 3 bits", lambda k: k.bytes_to_symbols(buf, 3)
    sym = _pykernels.bytes_to_symbols(buf, 3)
    yield "symbols_to_bytes 1 MiB, 3 bits", lambda k: k.symbols_to_bytes(sym, 3, len(data))
    D = rng.integers(0, 13, (1, 7), dtype=np.uint64)
    pays = [rng.integers(0, 13, 200000, dtype=np.uint64) for _ in range(7)]
    plan = _sparse(D, 1)
    yield "combine_shares 7 x 200000", lambda k: k.combine_shares(pays, *plan, 1, 13)


def end_to_end(rng, repeat: int):
    params = SchemeParams(4, 3, 2, Fraction(1, 4), PrimeField(65537))
    n = layout(params).n_prime * 20000
    F = rng.integers(0, params.q, n, dtype=np.uint64)
    global_encoding_matrices(params)
    rows = []
    for name, impl in (("cython", _ckernels), ("python", _pykernels)):
        if impl is None:
            continue
        saved = kernels._ext
        kernels._ext = _ckernels if name == "cython" else None
        try:
            bundles = encode(F, params, SeededSource(params.q, 0))
            t_enc = best(lambda: encode(F, params, SeededSource(params.q, 0)), repeat)
            t_dec = best(lambda: decode(bundles[1:]), repeat)
        finally:
            kernels._ext = saved
        rows.append((name, t_enc, t_dec))
    return n, rows


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"compiled extension available: {_ckernels is not None}")
    print(f"{'workload':34s} {'cython':>11s} {'python':>11s} {'speedup':>8s}")
    for name, fn in workloads(rng):
        t_py = best(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:34s} {'-':>11s} {t_py * 1e3:9.3f}ms {'-':>8s}")
            continue
        t_c = best(lambda: fn(_ckernels), args.repeat)
        print(f"{name:34s} {t_c * 1e3:9.3f}ms {t_py * 1e3:9.3f}ms {t_py / t_c:7.1f}x")
    n, rows = end_to_end(rng, args.repeat)
    for name, t_enc, t_dec in rows:
        print(f"end-to-end {name:6s} encode {n} symbols: {t_enc * 1e3:8.2f}ms   decode: {t_dec * 1e3:8.2f}ms")


if __name__ == "__main__":
    main()
