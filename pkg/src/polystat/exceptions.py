"""Error types shared across the package.

The CLI maps these to exit codes: precondition violations exit 2, resource
limit overruns exit 3, malformed inputs exit 1.
"""


class PolystatError(Exception):
    """Base class for package errors."""


class PreconditionError(PolystatError):
    """A documented precondition of an operation was violated."""


class ResourceLimitError(PolystatError):
    """A desk-scale limit (dimension, pieces, node budget) was exceeded."""


class InputError(PolystatError):
    """A problem file or CLI argument could not be parsed."""
