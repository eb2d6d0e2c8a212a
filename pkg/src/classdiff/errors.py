"""Exception hierarchy shared across the toolkit.

Every error carries the name of the subsystem that raised it plus the
process exit code the CLI maps it to.
"""


class ClassDiffError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1

    def __init__(self, message, module="classdiff"):
        super().__init__(message)
        self.module = module


class UsageError(ClassDiffError):
    """Bad arguments or flag values (CLI exit 2)."""

    exit_code = 2


class DataError(ClassDiffError):
    """Invalid input data: missing files, schema or invariant violations (exit 3)."""

    exit_code = 3


class DegenerateError(ClassDiffError):
    """Numerically degenerate input, e.g. a zero soft-score denominator (exit 4)."""

    exit_code = 4
