"""ERASIM — Exception hierarchy.

Decoder failures and budget overrides are *outcomes*, not exceptions;
these classes cover caller mistakes, bad files and bad configuration.
"""


class ErasimError(Exception):
    """Base class for all ERASIM errors."""


class WordError(ErasimError, ValueError):
    """Raised on length mismatches, out-of-range indices or bad symbols."""


class ParamsError(ErasimError, ValueError):
    """Raised when code parameters violate their preconditions."""


class CodebookFormatError(ErasimError):
    """Raised when a codebook file is malformed or breaks an invariant."""

    def __init__(self, message: str, line_no: int = 0):
        self.line_no = line_no
        if line_no:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class BruteForceCapError(ErasimError):
    """Raised when an exhaustive check is requested above its cap."""

    def __init__(self, message: str, requested: int = 0, cap: int = 0):
        self.requested = requested
        self.cap = cap
        super().__init__(f"{message} (requested {requested} checks, cap {cap})")


class ConfigError(ErasimError, ValueError):
    """Raised for invalid experiment configuration or unusable output paths."""
