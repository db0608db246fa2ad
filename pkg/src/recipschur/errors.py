"""Exception hierarchy shared by every module."""

from __future__ import annotations


class VerificationError(Exception):
    """Base class for all library errors."""


class DomainError(VerificationError, ValueError):
    """A point lies outside the domain of a function."""


class OutOfDomain(DomainError):
    """A node lies outside the interval a node set is bound to."""


class DuplicateNodes(VerificationError, ValueError):
    """Two nodes coincide (exactly, or closer than the float threshold)."""


class TooFewNodes(VerificationError, ValueError):
    pass


class ExactnessUnavailable(VerificationError, ValueError):
    """Exact rational mode was requested for inputs that are not rational-valued."""


class NodeCollision(VerificationError, ValueError):
    """A derived node multiset contains a repeated point."""


class DegenerateOrder(VerificationError, ValueError):
    pass


class MethodDisagreement(VerificationError, ArithmeticError):
    """Independent divided-difference algorithms disagree beyond tolerance."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class QuadratureFailure(VerificationError, ArithmeticError):
    pass


class UncertainClassification(VerificationError, ArithmeticError):
    """A floating-point value is too close to zero to certify its sign."""


class ConvexityNotGuaranteed(VerificationError, ValueError):
    pass


class RootNotFound(VerificationError, ArithmeticError):
    """A mean-value locator found no sign change; carries the residual range."""

    def __init__(self, message: str, residual_range: tuple[float, float] | None = None):
        super().__init__(message)
        self.residual_range = residual_range


class LengthMismatch(VerificationError, ValueError):
    pass


class NotComparable(VerificationError, ValueError):
    """Two vectors are not ordered by majorization."""
