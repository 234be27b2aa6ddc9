"""Exhaustive grid checks of the share-size lower bound.

Under leakage symmetry every share satisfies
``H(M_t) >= H(F) * min_phi sum_{i=z+1}^{tau} [phi(i) - phi(i-1) - (phi(i+1) - phi(i))]^+``
over non-decreasing ``phi`` on ``z..tau+1`` pinned to ``phi(z) = alpha`` and
``phi(tau) = phi(tau+1) = 1``. Here that minimum is computed exactly over all
such ``phi`` with values on the grid ``k / D``, and the concave-envelope facts
used to bound it are checked on arbitrary grid functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb

from .access import GridFunction, concave_envelope, gradient_objective, second_difference
from .errors import ParameterError, StateSpaceTooLargeError

MAX_GRID_STATES = 2_000_000


def grid_state_count(z: int, tau: int, alpha: Fraction, D: int) -> int:
    """Number of feasible monotone grid functions (interior values only)."""
    m = tau - z - 1
    free = D - int(Fraction(alpha) * D)
    return comb(free + m, m) if m > 0 else 1


def min_gradient_objective(z: int, tau: int, alpha, D: int) -> tuple[Fraction, GridFunction]:
    """Exact minimum of the clipped gradient-difference objective on the 1/D grid.

    Returns the minimum and the first minimizer in lexicographic order.
    ``z = 0`` with ``alpha = 0`` gives the variant used for the 1/tau bound.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ParameterError(f"infeasible pin phi(z) = alpha = {alpha}; alpha must lie in [0, 1]")
    if D < 1:
        raise ParameterError(f"grid denominator must be positive (got D={D})")
    if not 0 <= z < tau:
        raise ParameterError(f"need 0 <= z < tau (got z={z}, tau={tau})")
    if (alpha * D).denominator != 1:
        raise ParameterError(f"alpha={alpha} is not on the 1/{D} grid")
    n_states = grid_state_count(z, tau, alpha, D)
    if n_states > MAX_GRID_STATES:
        raise StateSpaceTooLargeError(f"{n_states} grid functions exceed the budget of {MAX_GRID_STATES}")

    a = int(alpha * D)
    m = tau - z - 1
    # vals[0] = phi(z), vals[1..m] interior, vals[m+1] = phi(tau), vals[m+2] = phi(tau+1)
    vals = [a] + [0] * m + [D, D]
    best = [None, None]

    def term(p: int) -> int:
        d = 2 * vals[p] - vals[p - 1] - vals[p + 1]
        return d if d > 0 else 0

    def finish(partial: int) -> None:
        # terms at positions m and m+1 still open (position m only if m >= 1)
        total = partial + (term(m) if m >= 1 else 0) + term(m + 1)
        if best[0] is None or total < best[0]:
            best[0] = total
            best[1] = tuple(vals)

    def extend(p: int, lo: int, partial: int) -> None:
        # place vals[p]; this closes the term at position p - 1 (if p >= 2)
        for v in range(lo, D + 1):
            vals[p] = v
            closed = partial + (term(p - 1) if p >= 2 else 0)
            if p == m:
                finish(closed)
            else:
                extend(p + 1, v, closed)

    if m == 0:
        finish(0)
    else:
        for first in range(a, D + 1):  # independent partitions
            vals[1] = first
            if m == 1:
                finish(0)
            else:
                extend(2, first, 0)

    argmin = GridFunction(z, tuple(Fraction(v, D) for v in best[1]))
    return Fraction(best[0], D), argmin


def piecewise_linear_phi(z: int, tau: int, alpha) -> GridFunction:
    """The straight line from (z, alpha) to (tau, 1), held at 1 on tau+1."""
    alpha = Fraction(alpha)
    slope = (1 - alpha) / (tau - z)
    vals = [alpha + slope * (i - z) for i in range(z, tau + 1)] + [Fraction(1)]
    return GridFunction(z, tuple(vals))


@dataclass
class EnvelopeReport:
    phi: GridFunction
    envelope: GridFunction
    violations: list[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def envelope_properties(phi: GridFunction) -> EnvelopeReport:
    """Check the envelope facts the lower-bound argument relies on.

    (i) envelope >= phi with equal endpoints, and envelope concave;
    (ii) where envelope != phi at an interior point, the envelope is linear there;
    (iii) where they agree, phi's clipped second difference dominates the envelope's;
    (iv) summing, phi's objective dominates the telescoped envelope gradients.
    """
    env = concave_envelope(phi)
    rep = EnvelopeReport(phi, env)
    lo, hi = phi.lo, phi.hi
    for i in phi.domain():
        if env(i) < phi(i):
            rep.violations.append(f"envelope below phi at {i}")
    if env(lo) != phi(lo) or env(hi) != phi(hi):
        rep.violations.append("envelope moves an endpoint")
    zero = Fraction(0)
    for i in range(lo + 1, hi):
        d_env = second_difference(env, i)
        if d_env < 0:
            rep.violations.append(f"envelope not concave at {i}")
        if env(i) != phi(i):
            if d_env != 0:
                rep.violations.append(f"envelope exceeds phi at {i} but is not linear there")
        elif max(zero, second_difference(phi, i)) < d_env:
            rep.violations.append(f"clipped second difference of phi below envelope's at {i}")
    if hi - lo >= 2:
        objective = gradient_objective(phi, lo, hi - 1)
        telescoped = (env(lo + 1) - env(lo)) - (env(hi) - env(hi - 1))
        if objective < telescoped:
            rep.violations.append(f"objective {objective} below telescoped envelope gradient {telescoped}")
    return rep


@dataclass(frozen=True)
class Theorem1Certificate:
    z: int
    tau: int
    alpha: Fraction
    D: int
    privacy_min: Fraction
    privacy_argmin: GridFunction
    privacy_bound: Fraction
    threshold_min: Fraction
    threshold_argmin: GridFunction
    threshold_bound: Fraction

    @property
    def holds(self) -> bool:
        return self.privacy_min >= self.privacy_bound and self.threshold_min >= self.threshold_bound

    @property
    def bound(self) -> Fraction:
        return max(self.privacy_bound, self.threshold_bound)


def theorem1_certificate(z: int, tau: int, alpha, D: int) -> Theorem1Certificate:
    """Grid minima of both branches of the share-size lower bound."""
    alpha = Fraction(alpha)
    if not 1 <= z < tau:
        raise ParameterError(f"need 1 <= z < tau (got z={z}, tau={tau})")
    m1, arg1 = min_gradient_objective(z, tau, alpha, D)
    m2, arg2 = min_gradient_objective(0, tau, 0, D)
    return Theorem1Certificate(
        z, tau, alpha, D,
        m1, arg1, (1 - alpha) / (tau - z),
        m2, arg2, Fraction(1, tau),
    )


def verify_theorem1_bound(z: int, tau: int, alpha, D: int) -> bool:
    return theorem1_certificate(z, tau, alpha, D).holds
