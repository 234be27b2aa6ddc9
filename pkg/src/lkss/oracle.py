"""Exact leakage measurement for linear schemes, and a brute-force cross-check.

For a linear scheme ``M = A F + B R`` with ``F`` and ``R`` uniform and
independent over GF(q), the shares of a server set ``S`` reveal

    I(F; M_S) = (rank [A_S B_S] - rank B_S) * log q

so leakage in units of ``H(F) = n' log q`` is an exact rational.
``enum_leakage`` computes the same quantity the slow way, by tabulating the
joint distribution over every input; it shares no code with the rank path.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .access import AccessFunction, planned_g
from .errors import LkssError, ParameterError, StateSpaceTooLargeError
from .field import PrimeField
from .leaky import SchemeParams, SeededSource, decode, encode, global_encoding_matrices, layout
from .planner import plan

ENUM_STATE_LIMIT = 10**7
MAX_CHECK_SERVERS = 12


def _rows(server_rows: Sequence[range], S: Iterable[int]) -> list[int]:
    return [r for t in sorted(S) for r in server_rows[t - 1]]


def rank_leakage(A: np.ndarray, B: np.ndarray, server_rows: Sequence[range], S: Iterable[int], q: int) -> Fraction:
    """``I(F; M_S) / H(F)`` for servers ``S`` (1-based) of the linear scheme (A, B)."""
    rows = _rows(server_rows, S)
    n_file = A.shape[1]
    if not rows or n_file == 0:
        return Fraction(0)
    AS = A[rows]
    BS = B[rows]
    full = np.hstack([AS, BS]) if BS.shape[1] else AS
    r_full = kernels.rank_mod(full, q)
    r_b = kernels.rank_mod(BS, q) if BS.shape[1] else 0
    return Fraction(r_full - r_b, n_file)


def share_entropy(A: np.ndarray, B: np.ndarray, server_rows: Sequence[range], S: Iterable[int], q: int) -> int:
    """``H(M_S)`` in symbols (log q units): rank of the servers' rows of [A B]."""
    rows = _rows(server_rows, S)
    if not rows:
        return 0
    return kernels.rank_mod(np.hstack([A[rows], B[rows]]), q)


Encoder = Callable[[tuple, tuple], Sequence]


def enum_leakage(encoder: Encoder, n_F: int, n_R: int, field: PrimeField, S: Iterable[int]) -> float:
    """Mutual information ``I(F; M_S)`` in bits by exhaustive enumeration.

    ``encoder(F, R)`` returns one share per server (an int or a tuple);
    ``S`` holds 1-based server indices. ``F`` and ``R`` are uniform.
    """
    q = field.q
    n_states = q ** (n_F + n_R)
    if n_states > ENUM_STATE_LIMIT:
        raise StateSpaceTooLargeError(
            f"{n_states} input states exceed {ENUM_STATE_LIMIT}; use rank_leakage for this instance"
        )
    S = sorted(S)
    joint: Counter = Counter()
    marg: Counter = Counter()
    symbols = range(q)
    for f in itertools.product(symbols, repeat=n_F):
        for r in itertools.product(symbols, repeat=n_R):
            shares = encoder(f, r)
            m = tuple(shares[t - 1] for t in S)
            joint[(f, m)] += 1
            marg[m] += 1
    # p(f) = q**n_R / N for every f since F is uniform
    n_r_states = q**n_R
    total = 0.0
    for (f, m), c in joint.items():
        total += c * (math.log2(c * n_states) - math.log2(n_r_states * marg[m]))
    return total / n_states


@dataclass
class SubsetResult:
    mask: int
    size: int
    leakage: Fraction
    recoverable: bool

    @property
    def servers(self) -> tuple[int, ...]:
        return tuple(t + 1 for t in range(self.mask.bit_length()) if self.mask >> t & 1)


@dataclass
class LeakageReport:
    params: SchemeParams
    subsets: list[SubsetResult]
    per_cardinality: dict[int, frozenset]
    symmetric: bool
    measured_g: AccessFunction | None
    planned_g: AccessFunction
    share_entropy: tuple[Fraction, ...]
    randomness_ratio: Fraction
    randomness_rank: int
    violations: list[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def share_entropy_sum(self) -> Fraction:
        return sum(self.share_entropy, Fraction(0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subset_bitmask", "size", "leak_num", "leak_den", "recoverable"])
        for r in self.subsets:
            w.writerow([r.mask, r.size, r.leakage.numerator, r.leakage.denominator, int(r.recoverable)])
        return buf.getvalue()

    def to_text(self) -> str:
        p = self.params
        fmt = lambda x: f"{x.numerator}/{x.denominator}"  # noqa: E731
        lines = [f"scheme T={p.T} tau={p.tau} z={p.z} alpha={fmt(p.alpha)} q={p.q}"]
        lines.append(f"subsets checked: {len(self.subsets)}")
        for s in sorted(self.per_cardinality):
            vals = ", ".join(fmt(v) for v in sorted(self.per_cardinality[s]))
            lines.append(f"  |S|={s}: leakage/H(F) in {{{vals}}}")
        lines.append(f"symmetric (leakage depends only on |S|): {self.symmetric}")
        if self.measured_g is not None:
            lines.append("measured g = [" + ", ".join(fmt(v) for v in self.measured_g) + "]")
        lines.append("planned g  = [" + ", ".join(fmt(v) for v in self.planned_g) + "]")
        lines.append("H(M_t)/H(F) = [" + ", ".join(fmt(v) for v in self.share_entropy) + "]")
        lines.append(f"sum_t H(M_t)/H(F) = {fmt(self.share_entropy_sum)}")
        lines.append(f"randomness/H(F) = {fmt(self.randomness_ratio)}")
        for v in self.violations:
            lines.append(f"VIOLATION: {v}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def check_scheme(params: SchemeParams, *, seed: int = 0) -> LeakageReport:
    """Scan every server subset of the built scheme and compare with the plan."""
    T, tau, z, q = params.T, params.tau, params.z, params.q
    if T > MAX_CHECK_SERVERS:
        raise ParameterError(f"subset scan is limited to T <= {MAX_CHECK_SERVERS} (got T={T})")
    lay = layout(params)
    A, B, server_rows = global_encoding_matrices(params)
    n_file = lay.n_prime
    scheme_plan = plan(params)
    target_g = planned_g(params)

    # one random superblock for functional recovery checks
    source = SeededSource(q, seed)
    F = source.take(n_file)
    bundles = encode(F, params, source, scheme_id=b"\0" * 16)

    subsets = []
    per_card: dict[int, set] = {0: {Fraction(0)}}
    violations = []
    for mask in range(1, 1 << T):
        servers = [t + 1 for t in range(T) if mask >> t & 1]
        size = len(servers)
        leak = rank_leakage(A, B, server_rows, servers, q)
        if size >= tau:
            try:
                recovered = bool(np.array_equal(decode([bundles[t - 1] for t in servers]), F))
            except LkssError:
                recovered = False
            if not recovered:
                violations.append(f"servers {servers}: decoding did not return the file")
            if leak != 1:
                violations.append(f"servers {servers}: recoverability needs leakage 1, measured {leak}")
        else:
            recovered = leak == 1
        if size <= z and leak > params.alpha:
            violations.append(f"servers {servers}: leakage {leak} exceeds alpha={params.alpha}")
        per_card.setdefault(size, set()).add(leak)
        subsets.append(SubsetResult(mask, size, leak, recovered))

    symmetric = all(len(v) == 1 for v in per_card.values())
    measured = None
    if symmetric:
        measured = AccessFunction(tuple(next(iter(per_card[s])) for s in range(T + 1)))
        if measured != target_g:
            violations.append(f"measured access function {list(measured)} differs from planned {list(target_g)}")
    else:
        for s, vals in sorted(per_card.items()):
            if len(vals) > 1:
                bad = [r.servers for r in subsets if r.size == s][:4]
                violations.append(f"leakage of size-{s} subsets is not symmetric: {sorted(vals)} (e.g. {bad})")

    h_shares = tuple(Fraction(share_entropy(A, B, server_rows, [t], q), n_file) for t in range(1, T + 1))
    for t, h in enumerate(h_shares, start=1):
        if h != scheme_plan.lambda_ratio:
            violations.append(f"H(M_{t})/H(F) = {h}, optimum is {scheme_plan.lambda_ratio}")
    rand_ratio = Fraction(B.shape[1], n_file)
    if rand_ratio != scheme_plan.rho_ratio:
        violations.append(f"randomness/H(F) = {rand_ratio}, optimum is {scheme_plan.rho_ratio}")
    rand_rank = kernels.rank_mod(B, q) if B.shape[1] else 0
    if rand_rank != B.shape[1]:
        violations.append(f"only {rand_rank} of {B.shape[1]} random symbols reach the shares")

    return LeakageReport(
        params=params,
        subsets=subsets,
        per_cardinality={k: frozenset(v) for k, v in per_card.items()},
        symmetric=symmetric,
        measured_g=measured,
        planned_g=target_g,
        share_entropy=h_shares,
        randomness_ratio=rand_ratio,
        randomness_rank=rand_rank,
        violations=violations,
    )
