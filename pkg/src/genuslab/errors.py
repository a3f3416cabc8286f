"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract: ValidationError -> 2,
InternalInconsistencyError -> 3, ResourceCapError -> 4.
"""


class GenuslabError(Exception):
    """Base class for all package errors."""


class StructuralError(GenuslabError):
    """Incompatible operands (variable/cap/ring mismatch) or malformed construction."""


class NotInvertibleError(GenuslabError):
    """Inversion or fractional power requested of a non-unit."""


class ValidationError(GenuslabError):
    """Invalid user input (files, CLI arguments, inadmissible sample points).

    `code` carries a machine-readable reason, e.g. "schema",
    "dimension-mismatch", "zero-pairing".
    """

    def __init__(self, message, code="invalid"):
        super().__init__(message)
        self.code = code


class InternalInconsistencyError(GenuslabError):
    """Two independent pipelines disagree; signals a bug, never bad input."""


class ResourceCapError(GenuslabError):
    """A hard enumeration or size cap was exceeded."""
