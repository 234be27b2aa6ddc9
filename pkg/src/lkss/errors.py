"""Exception types raised across the package."""


class LkssError(Exception):
    """Base class for all package errors."""


class ParameterError(LkssError, ValueError):
    """A scheme, ramp or grid parameter is out of its admissible range."""


class FieldMismatchError(LkssError, TypeError):
    """Operands belong to different prime fields."""


class InsufficientSharesError(LkssError):
    """Fewer shares than the reconstruction threshold were supplied."""


class ShareMismatchError(LkssError):
    """Shares do not belong together (scheme id, parameters, lengths)."""


class RandomnessExhaustedError(LkssError):
    """The randomness stream ran out before encoding finished."""


class StateSpaceTooLargeError(LkssError):
    """An exhaustive search would exceed its state budget."""


class ShareFormatError(LkssError):
    """A share file is malformed or corrupted."""
