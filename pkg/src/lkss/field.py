"""Arithmetic in prime fields GF(q).

Elements carry a reference to their field so that mixing fields is caught
at the operation site. Bulk work (encoding whole files) does not go through
:class:`FieldElement`; it uses integer arrays and :mod:`lkss.kernels`.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

from .errors import FieldMismatchError, ParameterError

DEFAULT_MODULUS = 65537

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field of integers modulo a prime ``q`` (64-bit range)."""

    __slots__ = ("q",)

    def __init__(self, q: int = DEFAULT_MODULUS):
        q = int(q)
        if q >= 1 << 64:
            raise ParameterError(f"modulus {q} exceeds the 64-bit range")
        if not is_prime(q):
            raise ParameterError(f"modulus {q} is not prime")
        self.q = q

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1 % self.q, self)

    @property
    def bits_per_symbol(self) -> int:
        """Number of whole data bits that fit injectively in one symbol."""
        return self.q.bit_length() - 1

    @property
    def array_dtype(self):
        # uint64 holds every residue of q < 2**32 and the kernels rely on
        # (q-1)**2 fitting in 64 bits; larger moduli use Python ints.
        return np.uint64 if self.q < 1 << 32 else object

    def elements(self, values: Iterable[int]) -> list["FieldElement"]:
        return [self(v) for v in values]

    def array(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=object if self.array_dtype is object else np.int64)
        return (arr % self.q).astype(self.array_dtype)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return pow(a, self.q - 2, self.q)


class FieldElement:
    """An element of a :class:`PrimeField`; immutable."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        if not 0 <= value < field.q:
            raise ParameterError(f"{value} is not a residue modulo {field.q}")
        self.value = value
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.q != self.field.q:
                raise FieldMismatchError(
                    f"cannot combine elements of GF({self.field.q}) and GF({other.field.q})"
                )
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.q
        return NotImplemented

    def _new(self, v: int) -> "FieldElement":
        return FieldElement(v % self.field.q, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.value * self.field.inv(o))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return self._new(pow(self.value, e, self.field.q))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field.q == other.field.q and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.field.q))

    def __int__(self) -> int:
        return self.value

    __index__ = __int__

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.q})"


Scalar = Union[FieldElement, int]


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def eval_poly(coeffs: Sequence[Scalar], x: FieldElement) -> FieldElement:
    """Horner evaluation of ``sum(coeffs[i] * x**i)``; empty coeffs give 0."""
    acc = x.field.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def solve_inverse(matrix: Sequence[Sequence[int]], q: int) -> list[list[int]]:
    """Inverse of a square matrix over GF(q) by Gauss-Jordan elimination.

    Raises ``ZeroDivisionError`` if the matrix is singular.
    """
    n = len(matrix)
    aug = [[int(v) % q for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = pow(aug[col][col], q - 2, q)
        aug[col] = [v * inv_p % q for v in aug[col]]
        for r in range(n):
            f = aug[r][col]
            if r != col and f:
                prow = aug[col]
                aug[r] = [(v - f * p) % q for v, p in zip(aug[r], prow)]
    return [row[n:] for row in aug]
