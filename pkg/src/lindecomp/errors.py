"""Exception types shared across the package."""

from __future__ import annotations


class LinDecompError(Exception):
    """Base class for all package errors."""


class DivisionByZero(LinDecompError, ZeroDivisionError):
    pass


class GroupTooLarge(LinDecompError):
    pass


class IncompatibleOperands(LinDecompError, ValueError):
    pass


class NotInvertible(LinDecompError, ArithmeticError):
    pass


class DimensionError(LinDecompError, ValueError):
    pass


class NotInSpan(LinDecompError):
    pass


class NoSolution(LinDecompError):
    pass


class MalformedTranscript(LinDecompError):
    """Public data is inconsistent with the attacked scheme."""


class ParameterRejection(LinDecompError):
    """Instance generation kept drawing degenerate parameters."""


class SamplerFailure(LinDecompError):
    pass
