"""Exception types raised across the package."""


class UnilabError(Exception):
    """Base class for all package errors."""


class DimensionError(UnilabError, ValueError):
    """Operand shapes do not conform."""


class ValidationError(UnilabError, ValueError):
    """An input violates a documented invariant (unitarity, stochasticity, ...)."""


class RangeError(UnilabError, ValueError):
    """A requested time lies outside the support of a schedule."""


class ZeroSupportError(UnilabError, ValueError):
    """Conditioning on an event of probability zero."""


class PremiseError(ValidationError):
    """The structural premise of a theorem-level computation does not hold."""
