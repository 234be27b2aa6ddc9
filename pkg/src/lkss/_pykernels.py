"""Pure-Python (numpy) versions of the compiled kernels.

Same signatures and results as ``_ckernels``. Used when the extension is
not built, when ``LKSS_PURE_PYTHON=1`` is set, and for moduli >= 2**32
(object arrays of Python ints).
"""

from __future__ import annotations

import numpy as np

_U64_MAX = (1 << 64) - 1


def matmul_mod(M, X, q: int) -> np.ndarray:
    """Return ``M @ X mod q``."""
    q = int(q)
    if M.shape[1] != X.shape[0]:
        raise ValueError(f"shape mismatch: {M.shape} @ {X.shape}")
    if q >= 1 << 32 or M.dtype == object or X.dtype == object:
        Mo = np.asarray(M, dtype=object)
        Xo = np.asarray(X, dtype=object)
        if Mo.size == 0 or Xo.size == 0:
            return np.zeros((M.shape[0], X.shape[1]), dtype=object)
        return (Mo.dot(Xo)) % q
    M = np.asarray(M, dtype=np.uint64)
    X = np.asarray(X, dtype=np.uint64)
    r, k = M.shape
    out = np.zeros((r, X.shape[1]), dtype=np.uint64)
    sq = max((q - 1) ** 2, 1)
    chunk = (_U64_MAX - q) // sq
    qq = np.uint64(q)
    since = 0
    for j in range(k):
        col = M[:, j]
        if not col.any():
            continue
        out += col[:, None] * X[j][None, :]
        since += 1
        if since == chunk:
            out %= qq
            since = 0
    out %= qq
    return out


def rank_mod(M, q: int) -> int:
    """Rank of ``M`` over GF(q) by Gaussian elimination."""
    q = int(q)
    a = [[int(v) % q for v in row] for row in np.asarray(M).tolist()]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        piv = next((r for r in range(rank, rows) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv_p = pow(a[rank][c], q - 2, q)
        prow = [v * inv_p % q for v in a[rank]]
        a[rank] = prow
        for r in range(rank + 1, rows):
            f = a[r][c]
            if f:
                a[r] = [(v - f * p) % q for v, p in zip(a[r], prow)]
        rank += 1
    return rank


def bytes_to_symbols(data, bits: int) -> np.ndarray:
    """Split a big-endian bit stream into ``bits``-wide symbols."""
    if not 1 <= bits <= 32:
        raise ValueError("bits per symbol must be in 1..32")
    raw = np.frombuffer(bytes(data), dtype=np.uint8)
    stream = np.unpackbits(raw)
    nsym = -(-stream.size // bits)
    padded = np.zeros(nsym * bits, dtype=np.uint64)
    padded[: stream.size] = stream
    weights = np.uint64(1) << np.arange(bits - 1, -1, -1, dtype=np.uint64)
    return padded.reshape(nsym, bits) @ weights if nsym else np.zeros(0, dtype=np.uint64)


def symbols_to_bytes(symbols, bits: int, nbytes: int) -> bytes:
    """Inverse of :func:`bytes_to_symbols`, truncated to ``nbytes`` bytes."""
    if not 1 <= bits <= 32:
        raise ValueError("bits per symbol must be in 1..32")
    sym = np.asarray(symbols, dtype=np.uint64)
    if nbytes < 0 or nbytes * 8 > sym.size * bits:
        raise ValueError(f"{sym.size} symbols cannot hold {nbytes} bytes")
    nsym = -(-nbytes * 8 // bits)
    sym = sym[:nsym]
    if (sym >> np.uint64(bits)).any():
        raise ValueError(f"symbol value exceeds {bits} bits")
    shifts = np.arange(bits - 1, -1, -1, dtype=np.uint64)
    stream = ((sym[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8).ravel()
    return np.packbits(stream[: nbytes * 8]).tobytes()


def combine_shares(payloads, row_ptr, src, col, coeff, s: int, q: int) -> np.ndarray:
    """Sparse per-superblock combination of server payloads (see ``_ckernels``)."""
    q = int(q)
    total = len(payloads[0])
    if any(len(p) != total for p in payloads):
        raise ValueError("payloads differ in length")
    nsb = total // s
    n_out = len(row_ptr) - 1
    big = q >= 1 << 32 or any(np.asarray(p).dtype == object for p in payloads)
    dtype = object if big else np.uint64
    views = [np.asarray(p, dtype=dtype)[: nsb * s].reshape(nsb, s) for p in payloads]
    out = np.zeros((nsb, n_out), dtype=dtype)
    qq = q if big else np.uint64(q)
    for r in range(n_out):
        acc = np.zeros(nsb, dtype=dtype)
        for e in range(row_ptr[r], row_ptr[r + 1]):
            c = int(coeff[e]) if big else np.uint64(coeff[e])
            acc = (acc + views[src[e]][:, col[e]] * c % qq) % qq
        out[:, r] = acc
    return out.ravel()
