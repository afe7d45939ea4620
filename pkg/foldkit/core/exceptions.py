"""
Error hierarchy for foldkit.

Library code raises these; only the command-line entry point turns them
into process exit codes.
"""

from typing import Any, Dict, Optional


class FoldkitError(Exception):
    """Base class for every error foldkit raises on purpose."""

    exit_code: int = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = dict(context)

    def with_context(self, **context: Any) -> "FoldkitError":
        """Attach location info (restart, iteration, fold, ...) while propagating."""
        for key, value in context.items():
            self.context.setdefault(key, value)
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        where = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} [{where}]"


class InputError(FoldkitError):
    """Bad input data or arguments (exit code 2)."""

    exit_code = 2


class DimensionError(InputError):
    """Shapes do not conform."""


class DegenerateSlicingError(InputError):
    """The response cannot be split into the requested number of slices."""


class InsufficientSliceError(InputError):
    """A slice has too few members for a within-slice covariance."""


class MatrixPropertyError(InputError):
    """A matrix is not symmetric or not positive semidefinite."""


class DatasetParseError(InputError):
    """Malformed dataset file."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = {}
        if line is not None:
            location["line"] = line
        if column is not None:
            location["column"] = column
        super().__init__(message, **location)
        self.line = line
        self.column = column


class ConfigError(InputError):
    """Invalid or incomplete run configuration."""

    def __init__(self, message: str, key: Optional[str] = None):
        context = {"key": key} if key is not None else {}
        super().__init__(message, **context)
        self.key = key


class SingularityError(FoldkitError):
    """A matrix that must be inverted is numerically singular (exit code 3)."""

    exit_code = 3

    def __init__(self, message: str, remedy: Optional[str] = None, **context: Any):
        super().__init__(message, **context)
        self.remedy = remedy

    def __str__(self) -> str:
        text = super().__str__()
        if self.remedy:
            text = f"{text}; try {self.remedy}"
        return text


class StorageError(FoldkitError):
    """Reading or writing a file failed (exit code 4)."""

    exit_code = 4
