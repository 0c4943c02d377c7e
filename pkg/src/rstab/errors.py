"""Exception types shared across the toolkit.

The CLI maps these onto distinct exit codes, so the split matters:
parse/schema problems, failed validity checks, and singular matrices
are three different kinds of outcome.
"""


class ToolkitError(Exception):
    """Base class for all rstab errors."""


class SpaceMismatchError(ToolkitError):
    """Operands live on different signal spaces or have unknown block names."""


class SingularMatrixError(ToolkitError):
    """A rational matrix required to be invertible has identically zero determinant."""


class InvariantViolation(ToolkitError):
    """A domain object failed its construction-time validity checks."""


class InternalStabilityError(InvariantViolation):
    """A closed loop failed the causality/stability conditions.

    Carries the offending condition report in ``report`` when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InfeasibleError(ToolkitError):
    """A synthesis problem has an empty constraint set."""


class ConvergenceError(ToolkitError):
    """A fixed-point iteration diverged or failed to converge."""


class SchemaError(ToolkitError):
    """An input document does not match the expected schema."""
