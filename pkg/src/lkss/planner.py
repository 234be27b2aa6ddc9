"""Closed-form optimal share size and randomness, plus parameter sweeps.

Only arithmetic lives here, so the oracle can compare a built scheme
against these numbers without sharing any construction code.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import ParameterError
from .leaky import SchemeParams, SuperblockLayout, layout


class Case(enum.Enum):
    RAMP_ONLY = "RampOnly"
    COMPOSED = "Composed"


def lambda_ratio(tau: int, z: int, alpha: Fraction) -> Fraction:
    """Optimal per-server share size over file entropy."""
    return max((1 - alpha) / (tau - z), Fraction(1, tau))


def rho_ratio(tau: int, z: int, alpha: Fraction) -> Fraction:
    """Optimal encoder randomness over file entropy."""
    return max(Fraction(0), z - tau * alpha) / (tau - z)


def _check_ranges(tau: int, z: int, alpha: Fraction) -> None:
    if not 1 <= z <= tau - 1:
        raise ParameterError(f"privacy threshold must satisfy 1 <= z <= tau - 1 (got z={z}, tau={tau})")
    if not 0 <= alpha <= 1:
        raise ParameterError(f"leakage alpha must lie in [0, 1] (got alpha={alpha})")


@dataclass(frozen=True)
class SchemePlan:
    params: SchemeParams
    lambda_ratio: Fraction
    lambda_sum_ratio: Fraction
    rho_ratio: Fraction
    layout: SuperblockLayout
    case: Case

    def describe(self) -> str:
        p, lay = self.params, self.layout
        return "\n".join(
            [
                f"T={p.T} tau={p.tau} z={p.z} alpha={p.alpha} q={p.q}",
                f"case: {self.case.value}",
                f"lambda/H(F) = {_fmt(self.lambda_ratio)}",
                f"lambda_sum/H(F) = {_fmt(self.lambda_sum_ratio)}",
                f"rho/H(F) = {_fmt(self.rho_ratio)}",
                f"superblock: n'={lay.n_prime} n1={lay.n1} n2={lay.n2} "
                f"share_symbols={lay.share_symbols_per_server} random_symbols={lay.rand_per_superblock}",
            ]
        )


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def plan(params: SchemeParams) -> SchemePlan:
    tau, z, alpha = params.tau, params.z, params.alpha
    _check_ranges(tau, z, alpha)
    lam = lambda_ratio(tau, z, alpha)
    return SchemePlan(
        params=params,
        lambda_ratio=lam,
        lambda_sum_ratio=params.T * lam,
        rho_ratio=rho_ratio(tau, z, alpha),
        layout=layout(params),
        case=Case.RAMP_ONLY if alpha >= Fraction(z, tau) else Case.COMPOSED,
    )


class SweepRow(NamedTuple):
    z: int
    alpha: Fraction
    lambda_ratio: Fraction
    rho_ratio: Fraction


def default_alpha_grid(tau: int, den: int | None = None) -> list[Fraction]:
    den = 4 * tau if den is None else den
    if den < 1:
        raise ParameterError(f"alpha grid denominator must be positive (got {den})")
    return [Fraction(k, den) for k in range(den + 1)]


def sweep(
    T: int,
    tau: int,
    z_range: Iterable[int] | None = None,
    alpha_grid: Iterable[Fraction] | None = None,
) -> list[SweepRow]:
    """Optimal ratios over a (z, alpha) grid, z-major then alpha ascending."""
    if not 2 <= tau <= T:
        raise ParameterError(f"sweep needs 2 <= tau <= T (got tau={tau}, T={T})")
    zs = list(z_range) if z_range is not None else list(range(1, tau))
    alphas = sorted(Fraction(a) for a in (alpha_grid if alpha_grid is not None else default_alpha_grid(tau)))
    rows = []
    for z in zs:
        for a in alphas:
            _check_ranges(tau, z, a)
            rows.append(SweepRow(z, a, lambda_ratio(tau, z, a), rho_ratio(tau, z, a)))
    return rows


SWEEP_HEADER = ("z", "alpha_num", "alpha_den", "lambda_num", "lambda_den", "rho_num", "rho_den")


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow(
            [
                r.z,
                r.alpha.numerator,
                r.alpha.denominator,
                r.lambda_ratio.numerator,
                r.lambda_ratio.denominator,
                r.rho_ratio.numerator,
                r.rho_ratio.denominator,
            ]
        )
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(
            SweepRow(
                int(rec["z"]),
                Fraction(int(rec["alpha_num"]), int(rec["alpha_den"])),
                Fraction(int(rec["lambda_num"]), int(rec["lambda_den"])),
                Fraction(int(rec["rho_num"]), int(rec["rho_den"])),
            )
        )
    return rows
