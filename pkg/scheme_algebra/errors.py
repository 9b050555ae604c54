"""Exception types shared by the scheme_algebra modules."""


class TerwilligerError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(TerwilligerError, ValueError):
    """Matrix or vector dimensions do not fit the requested operation."""


class DomainError(TerwilligerError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class RelationError(DomainError):
    """A representation triple does not satisfy the defining relations."""


class SingularityError(TerwilligerError, ZeroDivisionError):
    """A division by zero hidden inside a matrix formula."""


class ConsistencyError(TerwilligerError, RuntimeError):
    """Two independent constructions of the same object disagree."""


class ResourceLimitError(TerwilligerError, RuntimeError):
    """A dense matrix would exceed the configured materialization cap."""
