# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: modular matrix products, rank, share combining,
symbol bit-packing.

Contract is identical to ``_pykernels``; moduli must be below 2**32 so
that a product of two residues fits in an unsigned 64-bit word.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, uint8_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef inline uint64_t _powmod(uint64_t a, uint64_t e, uint64_t q) nogil:
    cdef uint64_t r = 1 % q
    a %= q
    while e:
        if e & 1:
            r = r * a % q
        a = a * a % q
        e >>= 1
    return r


def matmul_mod(const uint64_t[:, ::1] M, const uint64_t[:, ::1] X, uint64_t q):
    """Return ``M @ X mod q`` as a uint64 array; both inputs C-contiguous."""
    cdef Py_ssize_t r = M.shape[0], k = M.shape[1], n = X.shape[1]
    if X.shape[0] != k:
        raise ValueError(f"shape mismatch: {M.shape[0]}x{k} @ {X.shape[0]}x{n}")
    if q < 2 or q > 0xFFFFFFFF:
        raise ValueError("compiled kernels require 2 <= q < 2**32")
    out = np.empty((r, n), dtype=np.uint64)
    cdef uint64_t[:, ::1] O = out
    cdef uint64_t sq = (q - 1) * (q - 1)
    cdef uint64_t chunk = (~(<uint64_t>0) - q) // (sq if sq > 0 else 1)
    cdef Py_ssize_t i, j, c, since
    cdef uint64_t acc, m
    with nogil:
        for i in range(r):
            for c in range(n):
                O[i, c] = 0
            if chunk >= <uint64_t>k:
                for j in range(k):
                    m = M[i, j]
                    if m == 0:
                        continue
                    for c in range(n):
                        O[i, c] += m * X[j, c]
                for c in range(n):
                    O[i, c] %= q
            else:
                for c in range(n):
                    acc = 0
                    since = 0
                    for j in range(k):
                        acc += M[i, j] * X[j, c]
                        since += 1
                        if <uint64_t>since == chunk:
                            acc %= q
                            since = 0
                    O[i, c] = acc % q
    return out


cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline uint64_t _barrett(uint64_t x, uint64_t q, uint64_t m) nogil:
    # m = floor((2**64 - 1) / q); the estimate undershoots by at most 2q
    cdef uint64_t r = x - <uint64_t>((<u128>x * m) >> 64) * q
    while r >= q:
        r -= q
    return r


def combine_shares(payloads, const Py_ssize_t[::1] row_ptr, const Py_ssize_t[::1] src,
                   const Py_ssize_t[::1] col, const uint64_t[::1] coeff, Py_ssize_t s, uint64_t q):
    """Sparse linear combination of per-server payloads, superblock by superblock.

    ``payloads[j]`` holds ``nsb * s`` symbols. Output symbol ``r`` of every
    superblock is ``sum coeff[e] * payloads[src[e]][col[e]]`` over entries
    ``e`` in ``row_ptr[r] .. row_ptr[r+1]``. Returns ``nsb * n_out`` symbols.
    """
    if q < 2 or q > 0xFFFFFFFF:
        raise ValueError("compiled kernels require 2 <= q < 2**32")
    cdef Py_ssize_t m = len(payloads), n_out = row_ptr.shape[0] - 1
    if m == 0 or s <= 0:
        raise ValueError("need at least one payload and s >= 1")
    cdef Py_ssize_t total = len(payloads[0])
    cdef Py_ssize_t nsb = total // s
    cdef const uint64_t** ptrs = <const uint64_t**> malloc(m * sizeof(uint64_t*))
    if ptrs == NULL:
        raise MemoryError()
    cdef const uint64_t[::1] view
    views = []
    cdef Py_ssize_t j, b, b0, b1, r, e
    cdef uint64_t c, since
    cdef const uint64_t* P
    cdef uint64_t* o
    cdef uint64_t sq = (q - 1) * (q - 1)
    cdef uint64_t chunk = (~(<uint64_t>0) - q) // (sq if sq > 0 else 1)
    cdef uint64_t bm = (~(<uint64_t>0)) // q
    out = np.zeros(nsb * n_out, dtype=np.uint64)
    cdef uint64_t[::1] O = out
    try:
        for j in range(m):
            view = payloads[j]
            if view.shape[0] != total:
                raise ValueError("payloads differ in length")
            views.append(view)
            ptrs[j] = &view[0] if total else NULL
        for e in range(row_ptr[n_out]):
            if src[e] < 0 or src[e] >= m or col[e] < 0 or col[e] >= s:
                raise ValueError("combination entry out of range")
        if nsb == 0:
            return out
        o = &O[0]
        with nogil:
            # blocks of superblocks keep the output slice in cache across entries
            for b0 in range(0, nsb, 2048):
                b1 = b0 + 2048 if b0 + 2048 < nsb else nsb
                for r in range(n_out):
                    since = 0
                    for e in range(row_ptr[r], row_ptr[r + 1]):
                        c = coeff[e]
                        P = ptrs[src[e]] + col[e]
                        if since == chunk:
                            for b in range(b0, b1):
                                o[b * n_out + r] = _barrett(o[b * n_out + r], q, bm)
                            since = 0
                        if s == 1 and n_out == 1:
                            for b in range(b0, b1):
                                o[b] += c * P[b]
                        else:
                            for b in range(b0, b1):
                                o[b * n_out + r] += c * P[b * s]
                        since += 1
                    for b in range(b0, b1):
                        o[b * n_out + r] = _barrett(o[b * n_out + r], q, bm)
    finally:
        free(ptrs)
    return out


def rank_mod(const uint64_t[:, :] M, uint64_t q):
    """Rank of ``M`` over GF(q) by Gaussian elimination."""
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1]
    if q < 2 or q > 0xFFFFFFFF:
        raise ValueError("compiled kernels require 2 <= q < 2**32")
    if rows == 0 or cols == 0:
        return 0
    cdef uint64_t* a = <uint64_t*> malloc(rows * cols * sizeof(uint64_t))
    if a == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, r, c, piv, rank = 0
    cdef uint64_t inv_p, f, tmp
    try:
        with nogil:
            for i in range(rows):
                for j in range(cols):
                    a[i * cols + j] = M[i, j] % q
            for c in range(cols):
                if rank == rows:
                    break
                piv = -1
                for r in range(rank, rows):
                    if a[r * cols + c] != 0:
                        piv = r
                        break
                if piv < 0:
                    continue
                if piv != rank:
                    for j in range(c, cols):
                        tmp = a[piv * cols + j]
                        a[piv * cols + j] = a[rank * cols + j]
                        a[rank * cols + j] = tmp
                inv_p = _powmod(a[rank * cols + c], q - 2, q)
                for j in range(c, cols):
                    a[rank * cols + j] = a[rank * cols + j] * inv_p % q
                for r in range(rank + 1, rows):
                    f = a[r * cols + c]
                    if f == 0:
                        continue
                    f = q - f
                    for j in range(c, cols):
                        a[r * cols + j] = (a[r * cols + j] + f * a[rank * cols + j]) % q
                rank += 1
    finally:
        free(a)
    return rank


def bytes_to_symbols(const uint8_t[::1] data, int bits):
    """Split a big-endian bit stream into ``bits``-wide symbols.

    The final partial symbol is zero-filled on the right.
    """
    if bits < 1 or bits > 32:
        raise ValueError("bits per symbol must be in 1..32")
    cdef Py_ssize_t nbytes = data.shape[0]
    cdef Py_ssize_t nsym = (nbytes * 8 + bits - 1) // bits
    out = np.empty(nsym, dtype=np.uint64)
    cdef uint64_t[::1] O = out
    cdef uint64_t buf = 0, mask = ((<uint64_t>1) << bits) - 1
    cdef int have = 0
    cdef Py_ssize_t i, s = 0
    with nogil:
        for i in range(nbytes):
            buf = (buf << 8) | data[i]
            have += 8
            while have >= bits:
                have -= bits
                O[s] = (buf >> have) & mask
                s += 1
        if have > 0:
            O[s] = (buf << (bits - have)) & mask
    return out


def symbols_to_bytes(const uint64_t[:] symbols, int bits, Py_ssize_t nbytes):
    """Inverse of :func:`bytes_to_symbols`, truncated to ``nbytes`` bytes."""
    if bits < 1 or bits > 32:
        raise ValueError("bits per symbol must be in 1..32")
    cdef Py_ssize_t nsym = symbols.shape[0]
    if nbytes < 0 or nbytes * 8 > nsym * bits:
        raise ValueError(f"{nsym} symbols cannot hold {nbytes} bytes")
    out = np.empty(nbytes, dtype=np.uint8)
    cdef uint8_t[::1] O = out
    cdef uint64_t buf = 0, limit = (<uint64_t>1) << bits, v
    cdef int have = 0
    cdef Py_ssize_t i = 0, b = 0
    cdef bint bad = False
    with nogil:
        while b < nbytes:
            while have < 8:
                v = symbols[i]
                if v >= limit:
                    bad = True
                    break
                buf = (buf << bits) | v
                have += bits
                i += 1
            if bad:
                break
            have -= 8
            O[b] = <uint8_t>((buf >> have) & 0xFF)
            b += 1
    if bad:
        raise ValueError(f"symbol value exceeds {bits} bits")
    return out.tobytes()
