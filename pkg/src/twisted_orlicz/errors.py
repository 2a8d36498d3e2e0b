"""Exception hierarchy shared by every module."""

from __future__ import annotations


class TwistedOrliczError(Exception):
    """Base class; the CLI maps these to exit code 70."""


class ParamError(TwistedOrliczError, ValueError):
    pass


class DimensionError(TwistedOrliczError, ValueError):
    pass


class NonMonotoneInput(TwistedOrliczError, ValueError):
    pass


class DivergenceError(TwistedOrliczError):
    """Quadrature did not reach the requested tolerance."""


class BracketError(TwistedOrliczError):
    """No finite bracket below the configured cap."""


class ToleranceError(TwistedOrliczError):
    pass


class NoStableLimit(TwistedOrliczError):
    pass


class InconclusiveGrowth(NoStableLimit):
    pass


class NoStableSlope(TwistedOrliczError):
    pass


class ConcavityError(TwistedOrliczError):
    pass


class DifferentiabilityError(TwistedOrliczError):
    pass


class SearchExhausted(TwistedOrliczError):
    pass


class VerificationError(TwistedOrliczError):
    """A counterexample sub-check failed; ``part`` and ``index`` locate it."""

    def __init__(self, part: str, index: int | None, detail: str, report=None):
        where = f" at index {index}" if index is not None else ""
        super().__init__(f"property ({part}) failed{where}: {detail}")
        self.part = part
        self.index = index
        self.detail = detail
        self.report = report
