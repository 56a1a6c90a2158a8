"""Exception types shared across the package."""


class GrowthtightError(Exception):
    """Base class for all package errors."""


class InvalidInputError(GrowthtightError, ValueError):
    """Malformed or out-of-contract input (maps to CLI exit status 2)."""


class AlphabetMismatchError(InvalidInputError):
    """Words from different alphabets were combined."""


class ResourceLimitError(GrowthtightError):
    """A configured enumeration or iteration budget was exceeded (CLI exit status 3)."""


class InternalInvariantError(GrowthtightError):
    """An internal consistency check failed (CLI exit status 4)."""
