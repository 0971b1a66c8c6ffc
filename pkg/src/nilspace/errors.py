"""Exception types shared across the package."""


class NilspaceError(Exception):
    """Base class for errors raised by this package."""


class NotNilpotentError(NilspaceError, ValueError):
    """A matrix required to be nilpotent is not."""


class SingularMatrixError(NilspaceError, ValueError):
    """An invertible matrix was required but a singular one was supplied."""


class PreconditionUnmetError(NilspaceError, ValueError):
    """An operation's structural precondition does not hold for the input."""


class FieldTooSmallError(NilspaceError, ValueError):
    """The coefficient field has too few elements for the requested check."""


class DependentDirectionsError(NilspaceError, ValueError):
    """Direction matrices of an affine space must be linearly independent."""


class BudgetExceededError(NilspaceError, RuntimeError):
    """An evaluation budget was exhausted and no fallback was allowed."""
