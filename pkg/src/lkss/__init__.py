"""Storage-optimal (alpha, z)-private distributed storage.

A file is split across ``T`` servers so that any ``tau`` servers recover it
and any ``z`` servers learn at most a fraction ``alpha`` of it, using the
smallest possible shares and encoder randomness.
"""

from .access import AccessFunction, GridFunction, linear_ramp_g, optimal_g
from .errors import (
    InsufficientSharesError,
    LkssError,
    ParameterError,
    ShareFormatError,
    ShareMismatchError,
)
from .field import FieldElement, PrimeField
from .leaky import SchemeParams, ShareBundle, decode, encode, layout
from .planner import SchemePlan, plan, sweep

__all__ = [
    "AccessFunction",
    "GridFunction",
    "linear_ramp_g",
    "optimal_g",
    "InsufficientSharesError",
    "LkssError",
    "ParameterError",
    "ShareFormatError",
    "ShareMismatchError",
    "FieldElement",
    "PrimeField",
    "SchemeParams",
    "ShareBundle",
    "decode",
    "encode",
    "layout",
    "SchemePlan",
    "plan",
    "sweep",
]
