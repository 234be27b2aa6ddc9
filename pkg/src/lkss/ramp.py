"""(tau, L, T) linear ramp secret sharing over GF(q).

One block packs ``L`` secret symbols into the low-order coefficients of a
polynomial of degree ``tau - 1`` whose remaining ``tau - L`` coefficients
are random. Server ``t`` stores the evaluation at its point ``x_t``. Any
``tau`` shares interpolate the polynomial; any ``tau - L`` shares are
independent of the secret.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InsufficientSharesError, ParameterError
from .field import FieldElement, PrimeField, Scalar, eval_poly, solve_inverse


@dataclass(frozen=True)
class RampParams:
    tau: int
    L: int
    T: int
    field: PrimeField
    eval_points: tuple[int, ...] = dc_field(default=())

    def __post_init__(self):
        if not (1 <= self.L <= self.tau <= self.T):
            raise ParameterError(
                f"ramp needs 1 <= L <= tau <= T (got L={self.L}, tau={self.tau}, T={self.T})"
            )
        q = self.field.q
        if q < self.T + 1:
            raise ParameterError(f"q={q} is too small for T={self.T} distinct nonzero points")
        pts = self.eval_points or tuple(range(1, self.T + 1))
        pts = tuple(int(p) % q for p in pts)
        if len(pts) != self.T:
            raise ParameterError(f"need {self.T} evaluation points, got {len(pts)}")
        if 0 in pts or len(set(pts)) != len(pts):
            raise ParameterError("evaluation points must be distinct and nonzero")
        object.__setattr__(self, "eval_points", pts)

    @property
    def n_random(self) -> int:
        return self.tau - self.L


BlockShares = tuple  # tuple[FieldElement, ...] with one entry per server


def split_block(
    secret: Sequence[Scalar], randomness: Sequence[Scalar], params: RampParams
) -> BlockShares:
    """Shares of one block; entry ``t - 1`` goes to server ``t``."""
    if len(secret) != params.L:
        raise ParameterError(f"secret must have {params.L} symbols, got {len(secret)}")
    if len(randomness) != params.n_random:
        raise ParameterError(f"randomness must have {params.n_random} symbols, got {len(randomness)}")
    F = params.field
    coeffs = [F(int(c)) for c in secret] + [F(int(r)) for r in randomness]
    return tuple(eval_poly(coeffs, F(x)) for x in params.eval_points)


@lru_cache(maxsize=4096)
def interpolation_matrix(points: tuple[int, ...], q: int) -> tuple[tuple[int, ...], ...]:
    """Inverse Vandermonde matrix: maps values at ``points`` to coefficients."""
    n = len(points)
    vander = [[pow(x, k, q) for k in range(n)] for x in points]
    return tuple(tuple(row) for row in solve_inverse(vander, q))


def reconstruct_block(shares: Sequence[tuple[Scalar, Scalar]], params: RampParams) -> list[FieldElement]:
    """Recover the ``L`` secret symbols from at least ``tau`` ``(point, value)`` pairs."""
    F, q = params.field, params.field.q
    pts = [int(p) % q for p, _ in shares]
    if len(set(pts)) != len(pts):
        raise ParameterError("duplicate evaluation points among shares")
    unknown = set(pts) - set(params.eval_points)
    if unknown:
        raise ParameterError(f"points {sorted(unknown)} are not evaluation points of this scheme")
    if len(shares) < params.tau:
        raise InsufficientSharesError(f"need {params.tau} shares, got {len(shares)}")
    use = list(shares)[: params.tau]
    inv = interpolation_matrix(tuple(int(p) % q for p, _ in use), q)
    ys = [int(v) % q for _, v in use]
    return [F(sum(a * y for a, y in zip(inv[k], ys))) for k in range(params.L)]


def encoding_matrices(params: RampParams) -> tuple[np.ndarray, np.ndarray]:
    """``(A, B)`` with ``shares = A @ secret + B @ randomness`` (T x L, T x (tau-L))."""
    q = params.field.q
    rows = [[pow(x, k, q) for k in range(params.tau)] for x in params.eval_points]
    full = params.field.array(rows).reshape(params.T, params.tau)
    return full[:, : params.L].copy(), full[:, params.L :].copy()
