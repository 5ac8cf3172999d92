"""Exception types shared across the package.

The CLI maps these onto exit codes: SpecError/DomainError/PreconditionError
are usage-level failures (exit 1), StructuralError marks a broken graph or
an illegal move (exit 2), ResourceBudgetError marks an exhausted exploration
budget (exit 3).
"""


class DirgameError(Exception):
    """Base class for all package errors."""


class SpecError(DirgameError):
    """Invalid generator or distribution parameters."""


class DomainError(DirgameError):
    """Operation called outside its mathematical domain."""


class PreconditionError(DirgameError):
    """A stated hypothesis of a check does not hold for these arguments."""


class StructuralError(DirgameError):
    """Malformed vertex key, sink, degree overflow, or illegal move."""


class ResourceBudgetError(DirgameError):
    """Exploration exceeded the configured vertex/path budget."""

    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level
