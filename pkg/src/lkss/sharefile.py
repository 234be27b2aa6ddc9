"""Share file format and byte <-> symbol mapping.

Layout (little-endian, no padding)::

    magic "LKSS" | version u8 | q u64 | T u16 | tau u16 | z u16
    | alpha_num u64 | alpha_den u64 | scheme_id 16B | server_index u16
    | original_length u64 | superblock_count u64
    | payload: superblock_count * share_symbols u32 values

File bytes are read as one big-endian bit stream cut into
``floor(log2 q)``-bit symbols; the tail is zero-filled up to a whole
number of superblocks.
"""

from __future__ import annotations

import struct
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ParameterError, ShareFormatError
from .field import PrimeField
from .leaky import SchemeParams, ShareBundle, check_bundles, decode, encode, layout

MAGIC = b"LKSS"
VERSION = 1
HEADER = struct.Struct("<4sBQHHHQQ16sHQQ")
MAX_FILE_Q = 1 << 32


def symbol_count(nbytes: int, params: SchemeParams) -> int:
    """Padded number of symbols needed to carry ``nbytes`` bytes."""
    bits = params.field.bits_per_symbol
    n = -(-nbytes * 8 // bits)
    npr = layout(params).n_prime
    return -(-n // npr) * npr


def bytes_to_symbols(data: bytes, params: SchemeParams) -> np.ndarray:
    sym = kernels.bytes_to_symbols(data, params.field.bits_per_symbol)
    total = symbol_count(len(data), params)
    if total > len(sym):
        sym = np.concatenate([sym, np.zeros(total - len(sym), dtype=np.uint64)])
    return sym


def symbols_to_bytes(symbols: np.ndarray, params: SchemeParams, nbytes: int) -> bytes:
    try:
        return kernels.symbols_to_bytes(symbols, params.field.bits_per_symbol, nbytes)
    except ValueError as exc:
        raise ShareFormatError(f"decoded symbols do not form a valid file: {exc}") from exc


def _check_file_params(params: SchemeParams) -> None:
    if params.q >= MAX_FILE_Q:
        raise ParameterError(f"share files store 32-bit symbols; q={params.q} is too large")
    if params.T > 0xFFFF:
        raise ParameterError(f"share files support at most 65535 servers (got T={params.T})")


def split_bytes(data: bytes, params: SchemeParams, randomness, *, scheme_id: bytes | None = None) -> list[ShareBundle]:
    _check_file_params(params)
    return encode(bytes_to_symbols(data, params), params, randomness, scheme_id=scheme_id, original_length=len(data))


def recover_bytes(bundles: Sequence[ShareBundle]) -> bytes:
    check_bundles(bundles)
    params = bundles[0].params
    n = bundles[0].original_length
    if symbol_count(n, params) != bundles[0].superblock_count * layout(params).n_prime:
        raise ShareFormatError("payload size does not match the recorded file length")
    return symbols_to_bytes(decode(bundles), params, n)


def dump_share(bundle: ShareBundle) -> bytes:
    p = bundle.params
    _check_file_params(p)
    head = HEADER.pack(
        MAGIC, VERSION, p.q, p.T, p.tau, p.z,
        p.alpha.numerator, p.alpha.denominator,
        bundle.scheme_id, bundle.server_index,
        bundle.original_length, bundle.superblock_count,
    )
    return head + np.asarray(bundle.payload, dtype="<u4").tobytes()


@lru_cache(maxsize=64)
def _header_params(q: int, T: int, tau: int, z: int, a_num: int, a_den: int) -> SchemeParams:
    # shares of one split then carry the identical params object
    return SchemeParams(T, tau, z, Fraction(a_num, a_den), PrimeField(q))


def load_share(blob: bytes) -> ShareBundle:
    if len(blob) < HEADER.size:
        raise ShareFormatError(f"share is {len(blob)} bytes, shorter than the {HEADER.size}-byte header")
    (magic, version, q, T, tau, z, a_num, a_den, sid, idx, orig, nsb) = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ShareFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ShareFormatError(f"unsupported share format version {version}")
    if a_den == 0:
        raise ShareFormatError("alpha denominator is zero")
    try:
        params = _header_params(q, T, tau, z, a_num, a_den)
    except ParameterError as exc:
        raise ShareFormatError(f"header parameters are invalid: {exc}") from exc
    if not 1 <= idx <= T:
        raise ShareFormatError(f"server index {idx} outside 1..{T}")
    s = layout(params).share_symbols_per_server
    body = blob[HEADER.size :]
    if len(body) != 4 * nsb * s:
        raise ShareFormatError(f"payload has {len(body)} bytes, header implies {4 * nsb * s}")
    payload = np.frombuffer(body, dtype="<u4").astype(np.uint64)
    if payload.size and payload.max() >= q:
        raise ShareFormatError("payload symbol out of field range")
    return ShareBundle(sid, idx, params, orig, payload)


def share_filename(server_index: int) -> str:
    return f"share_{server_index}.lkss"


def write_shares(bundles: Sequence[ShareBundle], out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for b in bundles:
        path = out_dir / share_filename(b.server_index)
        path.write_bytes(dump_share(b))
        paths.append(path)
    return paths


def read_shares(paths: Sequence[Path]) -> list[ShareBundle]:
    return [load_share(Path(p).read_bytes()) for p in paths]
