"""Access functions: leakage fraction as a function of coalition size.

An access function ``g`` maps a coalition size ``t`` in ``0..T`` to the
fraction of the file entropy that any ``t`` servers learn. Everything here
is exact rational arithmetic (:class:`fractions.Fraction`); no floats.

:class:`GridFunction` is the same idea restricted to a window ``lo..hi``
(used by the converse search on ``z..tau+1``).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import LkssError, ParameterError

if TYPE_CHECKING:
    from .leaky import SchemeParams

Rational = Fraction


def _frac_tuple(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class AccessFunction:
    """Leakage profile ``g(0..T)``: starts at 0, non-decreasing, within [0, 1]."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = _frac_tuple(self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ParameterError("access function needs at least g(0)")
        if vals[0] != 0:
            raise ParameterError(f"g(0) must be 0, got {vals[0]}")
        for t, v in enumerate(vals):
            if not 0 <= v <= 1:
                raise ParameterError(f"g({t}) = {v} is outside [0, 1]")
        for t in range(1, len(vals)):
            if vals[t] < vals[t - 1]:
                raise ParameterError(f"g decreases between t={t - 1} and t={t}")

    @property
    def T(self) -> int:
        return len(self.values) - 1

    def __call__(self, t: int) -> Fraction:
        return self.values[t]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def to_csv(self) -> str:
        """Rows ``t,numerator,denominator`` with a header line."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "numerator", "denominator"])
        for t, v in enumerate(self.values):
            w.writerow([t, v.numerator, v.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "AccessFunction":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["t"]))
        if [int(r["t"]) for r in rows] != list(range(len(rows))):
            raise ParameterError("access-function CSV must list t = 0..T without gaps")
        return cls(tuple(Fraction(int(r["numerator"]), int(r["denominator"])) for r in rows))


@dataclass(frozen=True)
class GridFunction:
    """A function on the integer window ``lo .. lo + len(values) - 1``."""

    lo: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _frac_tuple(self.values))

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __call__(self, i: int) -> Fraction:
        if not self.lo <= i <= self.hi:
            raise IndexError(f"{i} outside [{self.lo}, {self.hi}]")
        return self.values[i - self.lo]

    def __len__(self) -> int:
        return len(self.values)

    def domain(self) -> range:
        return range(self.lo, self.hi + 1)


def linear_ramp_g(tau: int, L: int, T: int) -> AccessFunction:
    """Profile of a (tau, L, T) linear ramp scheme.

    Zero up to ``tau - L``, then rising by ``1/L`` per server, 1 from ``tau`` on.
    ``L == tau`` is allowed (no perfectly private prefix beyond t = 0).
    """
    if not (1 <= L <= tau <= T):
        raise ParameterError(f"ramp profile needs 1 <= L <= tau <= T (got L={L}, tau={tau}, T={T})")
    vals = []
    for t in range(T + 1):
        if t <= tau - L:
            vals.append(Fraction(0))
        elif t <= tau:
            vals.append(Fraction(t - tau + L, L))
        else:
            vals.append(Fraction(1))
    return AccessFunction(tuple(vals))


def optimal_g(params: "SchemeParams") -> AccessFunction:
    """Piecewise-linear profile with slope alpha/z up to z, then straight to 1 at tau."""
    T, tau, z, alpha = params.T, params.tau, params.z, params.alpha
    if alpha >= Fraction(z, tau):
        raise ParameterError(
            f"alpha={alpha} >= z/tau={Fraction(z, tau)}: use linear_ramp_g(tau, tau, T)"
        )
    slope = (1 - alpha) / (tau - z)
    vals = []
    for t in range(T + 1):
        if t <= z:
            vals.append(alpha / z * t)
        elif t <= tau:
            vals.append(slope * (t - z) + alpha)
        else:
            vals.append(Fraction(1))
    return AccessFunction(tuple(vals))


def planned_g(params: "SchemeParams") -> AccessFunction:
    """The profile the construction realizes for ``params`` (either case)."""
    if params.alpha >= Fraction(params.z, params.tau):
        return linear_ramp_g(params.tau, params.tau, params.T)
    return optimal_g(params)


def decompose(g: AccessFunction, params: "SchemeParams") -> tuple[AccessFunction, AccessFunction]:
    """Split ``g`` into the (tau, tau, T) ramp part and the (tau, tau-z, T) ramp part."""
    tau, z, alpha = params.tau, params.z, params.alpha
    if alpha >= Fraction(z, tau):
        raise ParameterError("decomposition only applies when alpha < z/tau")
    if g.T != params.T:
        raise ParameterError(f"g is defined on 0..{g.T}, params have T={params.T}")
    g1_vals = tuple(alpha / z * min(t, tau) for t in range(g.T + 1))
    g2_vals = tuple(a - b for a, b in zip(g.values, g1_vals))
    try:
        g1 = AccessFunction(g1_vals)
        g2 = AccessFunction(g2_vals)
    except ParameterError as exc:
        raise LkssError(f"decomposition produced an invalid component: {exc}") from exc
    return g1, g2


def max_gradient(g: AccessFunction | GridFunction | Sequence) -> Fraction:
    """Largest single-step increase ``max_t g(t+1) - g(t)`` (0 for one point)."""
    vals = g.values if hasattr(g, "values") else _frac_tuple(g)
    if len(vals) < 2:
        return Fraction(0)
    return max(b - a for a, b in zip(vals, vals[1:]))


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def concave_envelope(phi: GridFunction) -> GridFunction:
    """Least concave majorant of ``phi`` on its integer window (upper hull)."""
    pts = [(i, phi(i)) for i in phi.domain()]
    hull: list[tuple[int, Fraction]] = []
    for p in pts:
        # drop points that are on or below the chord to p
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    out = []
    k = 0
    for i in phi.domain():
        while k + 1 < len(hull) and hull[k + 1][0] <= i:
            k += 1
        x0, y0 = hull[k]
        if x0 == i:
            out.append(y0)
        else:
            x1, y1 = hull[k + 1]
            out.append(y0 + (y1 - y0) * Fraction(i - x0, x1 - x0))
    return GridFunction(phi.lo, tuple(out))


def second_difference(phi: GridFunction, i: int) -> Fraction:
    """``(phi(i) - phi(i-1)) - (phi(i+1) - phi(i))``."""
    return 2 * phi(i) - phi(i - 1) - phi(i + 1)


def gradient_objective(phi: GridFunction, z: int, tau: int) -> Fraction:
    """Sum over i = z+1..tau of the clipped second differences of ``phi``."""
    if phi.lo > z or phi.hi < tau + 1:
        raise ParameterError(f"phi must cover [{z}, {tau + 1}], covers [{phi.lo}, {phi.hi}]")
    return sum((max(Fraction(0), second_difference(phi, i)) for i in range(z + 1, tau + 1)), Fraction(0))


def window(g: AccessFunction, z: int, tau: int) -> GridFunction:
    """Restrict ``g`` to ``z..tau+1`` with the convention ``phi(tau+1) = g(tau)``."""
    vals = [g(i) for i in range(z, tau + 1)] + [g(tau)]
    return GridFunction(z, tuple(vals))
