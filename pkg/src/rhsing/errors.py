"""Exception hierarchy shared by all modules."""


class RHError(Exception):
    """Base class for errors raised by :mod:`rhsing`."""


class ShapeError(RHError, ValueError):
    pass


class NotDivisibleError(RHError, ValueError):
    """Raised when a Laurent polynomial lacks the requested vanishing order at 1."""


class CircleSingularError(RHError):
    """A polynomial (or determinant) has a zero on, or too close to, the unit circle."""


class SymmetryError(RHError, ValueError):
    """A boundary function is not in the required class R_m."""


class NotSurjectiveError(RHError):
    """The operator is not onto; ``witness`` is a right-hand side outside the image."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InconclusiveError(RHError):
    """Numerical nullity scan did not stabilise within the size cap."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConsistencyError(RHError):
    """Two independent routes to the same integer disagree."""


class BlockStructureError(RHError, ValueError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class IrreducibleSingularityError(RHError):
    pass


class FactorizationError(RHError, ValueError):
    pass
