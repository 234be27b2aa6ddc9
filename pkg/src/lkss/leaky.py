"""The (alpha, z)-private storage scheme built from one or two ramp schemes.

If ``alpha >= z / tau`` a single (tau, tau, T) ramp scheme already leaks
at most ``z / tau <= alpha`` to ``z`` servers and needs no randomness.

Otherwise each superblock of ``n'`` file symbols is split in two parts:

* the first ``n1 = (alpha / z) * tau * n'`` symbols go through (tau, tau, T)
  ramp blocks (no randomness);
* the remaining ``n2 = n' - n1`` symbols go through (tau, tau - z, T) ramp
  blocks, each consuming ``z`` random symbols.

Every server stores one symbol per block, so a share holds
``n1 / tau + n2 / (tau - z)`` symbols per superblock.
"""

from __future__ import annotations

import os
import secrets
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Protocol, Sequence

import numpy as np

from . import kernels
from .errors import (
    InsufficientSharesError,
    ParameterError,
    RandomnessExhaustedError,
    ShareMismatchError,
)
from .field import DEFAULT_MODULUS, PrimeField
from .ramp import RampParams, encoding_matrices, interpolation_matrix, split_block


def parse_rational(value) -> Fraction:
    """Accept ``Fraction``, int, or strings like ``"1/4"`` / ``"0.25"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ParameterError("alpha must be given exactly (use a fraction such as '1/4')")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse {value!r} as a rational") from exc


@dataclass(frozen=True)
class SchemeParams:
    """Designer's knobs: T servers, recovery threshold tau, privacy threshold z, leakage alpha."""

    T: int
    tau: int
    z: int
    alpha: Fraction
    field: PrimeField = dc_field(default_factory=lambda: PrimeField(DEFAULT_MODULUS))

    def __post_init__(self):
        object.__setattr__(self, "alpha", parse_rational(self.alpha))
        T, tau, z, alpha = self.T, self.tau, self.z, self.alpha
        if T < 2:
            raise ParameterError(f"need T >= 2 servers (got T={T})")
        if not 1 <= tau <= T:
            raise ParameterError(f"reconstruction threshold must satisfy 1 <= tau <= T (got tau={tau}, T={T})")
        if not 1 <= z <= tau - 1:
            raise ParameterError(f"privacy threshold must satisfy 1 <= z <= tau - 1 (got z={z}, tau={tau})")
        if not 0 <= alpha <= 1:
            raise ParameterError(f"leakage alpha must lie in [0, 1] (got alpha={alpha})")
        if self.field.q < T + 1:
            raise ParameterError(f"field size q={self.field.q} must be at least T + 1 = {T + 1}")
        # params key several caches on the decode path; Fraction hashing is slow
        object.__setattr__(self, "_hash", hash((T, tau, z, alpha, self.field)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def ramp_only(self) -> bool:
        return self.alpha >= Fraction(self.z, self.tau)


@dataclass(frozen=True)
class SuperblockLayout:
    n_prime: int
    n1: int
    n2: int
    blocks1: int
    blocks2: int
    rand_per_superblock: int
    share_symbols_per_server: int


@lru_cache(maxsize=256)
def layout(params: SchemeParams) -> SuperblockLayout:
    """Smallest superblock on which the n1 / n2 split is integral."""
    tau, z, alpha = params.tau, params.z, params.alpha
    if params.ramp_only:
        return SuperblockLayout(tau, tau, 0, 1, 0, 0, 1)
    # n1 / tau = (alpha / z) * n' must be an integer, so n' steps by den(alpha / z);
    # m = tau - z always makes n2 divisible by tau - z.
    step = (alpha / z).denominator
    for m in range(1, tau - z + 1):
        n = m * step
        n1 = alpha * tau * n / z
        assert n1.denominator == 1
        n1 = int(n1)
        n2 = n - n1
        if n2 % (tau - z) == 0:
            break
    b1, b2 = n1 // tau, n2 // (tau - z)
    return SuperblockLayout(n, n1, n2, b1, b2, z * b2, b1 + b2)


class GlobalMatrices(NamedTuple):
    """``shares = A @ F + B @ R`` for one superblock; ``server_rows[t-1]`` are server t's rows."""

    A: np.ndarray
    B: np.ndarray
    server_rows: tuple[range, ...]


def _ramp_parts(params: SchemeParams):
    return (
        RampParams(params.tau, params.tau, params.T, params.field),
        RampParams(params.tau, params.tau - params.z, params.T, params.field),
    )


@lru_cache(maxsize=256)
def global_encoding_matrices(params: SchemeParams) -> GlobalMatrices:
    lay = layout(params)
    T, tau, s = params.T, params.tau, lay.share_symbols_per_server
    r1, r2 = _ramp_parts(params)
    A1, _ = encoding_matrices(r1)
    A2, B2 = encoding_matrices(r2)
    L2, z = r2.L, params.z
    A = np.zeros((T * s, lay.n_prime), dtype=params.field.array_dtype)
    B = np.zeros((T * s, lay.rand_per_superblock), dtype=params.field.array_dtype)
    for t in range(T):
        for b in range(lay.blocks1):
            A[t * s + b, b * tau : (b + 1) * tau] = A1[t]
        for b in range(lay.blocks2):
            row = t * s + lay.blocks1 + b
            A[row, lay.n1 + b * L2 : lay.n1 + (b + 1) * L2] = A2[t]
            B[row, b * z : (b + 1) * z] = B2[t]
    A.setflags(write=False)
    B.setflags(write=False)
    return GlobalMatrices(A, B, tuple(range(t * s, (t + 1) * s) for t in range(T)))


def superblock_encoder(params: SchemeParams):
    """Scalar encoder ``(F, R) -> per-server share tuples`` built on ``split_block``.

    Independent of the matrix path; used by the enumeration oracle and tests.
    """
    lay = layout(params)
    r1, r2 = _ramp_parts(params)
    tau, L2, z = params.tau, r2.L, params.z

    def encode_one(F: Sequence[int], R: Sequence[int]) -> list[tuple[int, ...]]:
        if len(F) != lay.n_prime or len(R) != lay.rand_per_superblock:
            raise ParameterError("superblock input has the wrong length")
        cols = []
        for b in range(lay.blocks1):
            cols.append(split_block(F[b * tau : (b + 1) * tau], [], r1))
        for b in range(lay.blocks2):
            sec = F[lay.n1 + b * L2 : lay.n1 + (b + 1) * L2]
            cols.append(split_block(sec, R[b * z : (b + 1) * z], r2))
        return [tuple(int(col[t]) for col in cols) for t in range(params.T)]

    return encode_one


class SymbolSource(Protocol):
    def take(self, n: int) -> np.ndarray: ...


class StreamSource:
    """A finite, pre-drawn randomness stream; raises once it runs dry."""

    def __init__(self, values, q: int):
        self._buf = PrimeField(q).array(values) if len(values) else np.zeros(0, dtype=np.uint64)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        if self._pos + n > len(self._buf):
            raise RandomnessExhaustedError(
                f"needed {n} random symbols, only {len(self._buf) - self._pos} left"
            )
        out = self._buf[self._pos : self._pos + n]
        self._pos += n
        return out


class SystemRandomSource:
    """Uniform symbols from the operating system's entropy pool."""

    def __init__(self, q: int):
        self.q = q

    def take(self, n: int) -> np.ndarray:
        q = self.q
        if q >= 1 << 32:
            return np.array([secrets.randbelow(q) for _ in range(n)], dtype=object)
        bound = ((1 << 32) // q) * q
        out = np.empty(0, dtype=np.uint64)
        while out.size < n:
            want = n - out.size
            raw = np.frombuffer(os.urandom(4 * (want + want // 8 + 8)), dtype="<u4").astype(np.uint64)
            out = np.concatenate([out, raw[raw < bound] % np.uint64(q)])
        return out[:n]


class SeededSource:
    """Deterministic, NOT secure: for tests and reproducible fixtures only."""

    def __init__(self, q: int, seed: int):
        self.q = q
        self._rng = np.random.default_rng(seed)

    def take(self, n: int) -> np.ndarray:
        out = self._rng.integers(0, self.q, size=n, dtype=np.uint64)
        return out if self.q < 1 << 32 else out.astype(object)


def as_source(randomness, q: int) -> SymbolSource:
    # ndarray has its own .take, so test for arrays first
    if isinstance(randomness, np.ndarray):
        return StreamSource(randomness, q)
    if hasattr(randomness, "take"):
        return randomness
    return StreamSource(list(randomness), q)


@dataclass(eq=False)
class ShareBundle:
    """Everything server ``server_index`` stores."""

    scheme_id: bytes
    server_index: int
    params: SchemeParams
    original_length: int
    payload: np.ndarray

    @property
    def superblock_count(self) -> int:
        return len(self.payload) // layout(self.params).share_symbols_per_server


def _symbol_array(symbols, field: PrimeField) -> np.ndarray:
    if isinstance(symbols, np.ndarray) and symbols.dtype == field.array_dtype:
        arr = symbols
    else:
        vals = [int(s) for s in symbols] if not isinstance(symbols, np.ndarray) else symbols
        arr = np.asarray(vals, dtype=np.int64 if field.array_dtype is not object else object)
        if arr.size and (arr.min() < 0):
            raise ParameterError("file symbols must be non-negative residues")
        arr = arr.astype(field.array_dtype)
    if arr.size and arr.max() >= field.q:
        raise ParameterError(f"file symbols must be < q = {field.q}")
    return arr.ravel()


def encode(
    file_symbols,
    params: SchemeParams,
    randomness,
    *,
    scheme_id: bytes | None = None,
    original_length: int = 0,
) -> list[ShareBundle]:
    """Encode whole superblocks; returns bundles for servers 1..T in order."""
    lay = layout(params)
    q = params.q
    F = _symbol_array(file_symbols, params.field)
    if len(F) % lay.n_prime:
        raise ParameterError(f"file length {len(F)} is not a multiple of the superblock size {lay.n_prime}")
    nsb = len(F) // lay.n_prime
    R = np.asarray(as_source(randomness, q).take(nsb * lay.rand_per_superblock))
    G = global_encoding_matrices(params)
    gen = np.hstack([G.A, G.B])
    X = np.vstack([F.reshape(nsb, lay.n_prime).T, R.reshape(nsb, lay.rand_per_superblock).T.astype(F.dtype)])
    Y = kernels.matmul_mod(gen, X, q)
    sid = scheme_id if scheme_id is not None else secrets.token_bytes(16)
    s = lay.share_symbols_per_server
    return [
        ShareBundle(sid, t + 1, params, original_length, np.ascontiguousarray(Y[t * s : (t + 1) * s].T).ravel())
        for t in range(params.T)
    ]


@lru_cache(maxsize=4096)
def decode_matrix(params: SchemeParams, servers: tuple[int, ...]) -> np.ndarray:
    """Map from the stacked shares of ``servers`` (exactly tau) to one superblock."""
    lay = layout(params)
    q, tau, s = params.q, params.tau, lay.share_symbols_per_server
    pts = tuple(RampParams(tau, tau, params.T, params.field).eval_points[i - 1] for i in servers)
    inv = interpolation_matrix(pts, q)
    L2 = tau - params.z
    D = np.zeros((lay.n_prime, tau * s), dtype=params.field.array_dtype)
    for b in range(lay.blocks1):
        for k in range(tau):
            for j in range(tau):
                D[b * tau + k, j * s + b] = inv[k][j]
    for b in range(lay.blocks2):
        for k in range(L2):
            for j in range(tau):
                D[lay.n1 + b * L2 + k, j * s + lay.blocks1 + b] = inv[k][j]
    D.setflags(write=False)
    return D


def check_bundles(bundles: Sequence[ShareBundle]) -> None:
    """Raise unless the bundles are mutually consistent."""
    if not bundles:
        raise InsufficientSharesError("no shares supplied")
    first = bundles[0]
    for b in bundles[1:]:
        if b.scheme_id != first.scheme_id:
            raise ShareMismatchError("shares come from different split operations (scheme id differs)")
        if b.params is not first.params and b.params != first.params:
            raise ShareMismatchError("shares disagree on scheme parameters")
        if b.original_length != first.original_length or len(b.payload) != len(first.payload):
            raise ShareMismatchError("shares disagree on file length")
    idx = [b.server_index for b in bundles]
    if len(set(idx)) != len(idx):
        raise ShareMismatchError(f"duplicate server indices in {sorted(idx)}")
    for i in idx:
        if not 1 <= i <= first.params.T:
            raise ShareMismatchError(f"server index {i} outside 1..{first.params.T}")
    if len(first.payload) % layout(first.params).share_symbols_per_server:
        raise ShareMismatchError("payload length is not a whole number of superblocks")


@lru_cache(maxsize=4096)
def _decode_plan(params: SchemeParams, servers: tuple[int, ...]):
    # nonzero entries of decode_matrix, row by row, split into (server slot, column)
    D = decode_matrix(params, servers)
    s = layout(params).share_symbols_per_server
    rows, cols = np.nonzero(D)
    row_ptr = np.searchsorted(rows, np.arange(D.shape[0] + 1))
    return row_ptr, cols // s, cols % s, D[rows, cols]


def decode(bundles: Sequence[ShareBundle]) -> np.ndarray:
    """Recover the encoded symbols from at least tau consistent bundles."""
    check_bundles(bundles)
    params = bundles[0].params
    if len(bundles) < params.tau:
        raise InsufficientSharesError(f"need {params.tau} shares, got {len(bundles)}")
    chosen = sorted(bundles, key=lambda b: b.server_index)[: params.tau]
    row_ptr, src, col, coeff = _decode_plan(params, tuple(b.server_index for b in chosen))
    s = layout(params).share_symbols_per_server
    return kernels.combine_shares([b.payload for b in chosen], row_ptr, src, col, coeff, s, params.q)
