"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``LKSS_PURE_PYTHON=1`` before import to force the fallback.
``BACKEND`` names the implementation that was selected.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_ext = None
if os.environ.get("LKSS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _ext  # type: ignore[no-redef]
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"

_COMPILED_Q_LIMIT = 1 << 32


def _use_ext(q: int, *arrays) -> bool:
    return _ext is not None and q < _COMPILED_Q_LIMIT and all(a.dtype != object for a in arrays)


def _u64(a) -> np.ndarray:
    a = np.asarray(a)
    return a if a.dtype == np.uint64 else a.astype(np.uint64)


def matmul_mod(M, X, q: int) -> np.ndarray:
    M, X = np.asarray(M), np.asarray(X)
    if _use_ext(q, M, X):
        return _ext.matmul_mod(np.ascontiguousarray(_u64(M)), np.ascontiguousarray(_u64(X)), q)
    return _pykernels.matmul_mod(M, X, q)


def combine_shares(payloads, row_ptr, src, col, coeff, s: int, q: int) -> np.ndarray:
    """Per-superblock sparse combination of equally long server payloads."""
    payloads = [np.asarray(p) for p in payloads]
    coeff = np.asarray(coeff)
    if _use_ext(q, coeff, *payloads):
        idx = lambda a: np.ascontiguousarray(a, dtype=np.intp)  # noqa: E731
        return _ext.combine_shares(
            [np.ascontiguousarray(p, dtype=np.uint64) for p in payloads],
            idx(row_ptr), idx(src), idx(col), np.ascontiguousarray(coeff, dtype=np.uint64), s, q,
        )
    return _pykernels.combine_shares(payloads, row_ptr, src, col, coeff, s, q)


def rank_mod(M, q: int) -> int:
    M = np.asarray(M)
    if M.ndim != 2 or 0 in M.shape:
        return 0
    if _use_ext(q, M):
        return _ext.rank_mod(_u64(M), q)
    return _pykernels.rank_mod(M, q)


def bytes_to_symbols(data: bytes, bits: int) -> np.ndarray:
    if _ext is not None:
        return _ext.bytes_to_symbols(np.frombuffer(bytes(data), dtype=np.uint8), bits)
    return _pykernels.bytes_to_symbols(data, bits)


def symbols_to_bytes(symbols, bits: int, nbytes: int) -> bytes:
    if _ext is not None:
        return _ext.symbols_to_bytes(_u64(symbols), bits, nbytes)
    return _pykernels.symbols_to_bytes(symbols, bits, nbytes)
