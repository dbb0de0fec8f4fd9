"""Exception hierarchy shared by the library and the CLI.

Every error carries a human readable ``detail`` and the process exit code the
CLI maps it to (0 success, 1 usage/config, 2 numerical check, 3 I/O).
"""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class EnkError(Exception):
    """Base error with an exit code, analogous to a status-coded HTTP error."""

    exit_code: int = EXIT_USAGE

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return self.detail


class ShapeError(EnkError, ValueError):
    """Tensor extents are invalid or do not agree."""


class DimsError(EnkError, ValueError):
    """Convolution dimensions are invalid (kernel larger than input, ...)."""


class ParameterError(EnkError, ValueError):
    """An argument is outside its documented domain."""


class GraphError(EnkError, ValueError):
    """A model graph is malformed or incompatible with its input."""

    def __init__(self, detail: str, layer_index: Optional[int] = None):
        if layer_index is not None:
            detail = f"layer {layer_index}: {detail}"
        super().__init__(detail)
        self.layer_index = layer_index


class ConfigError(EnkError):
    """Run configuration or command-line usage is invalid."""


class NumericalCheckError(EnkError):
    exit_code = EXIT_NUMERICAL


class NonFiniteError(NumericalCheckError):
    """A library operation produced NaN or Inf."""


class FormatError(EnkError):
    """A file does not follow its format; carries the byte offset or row."""

    exit_code = EXIT_IO

    def __init__(self, detail: str, offset: Optional[int] = None, row: Optional[int] = None):
        if offset is not None:
            detail = f"{detail} (at byte offset {offset})"
        if row is not None:
            detail = f"{detail} (at row {row})"
        super().__init__(detail)
        self.offset = offset
        self.row = row


class FileError(EnkError):
    exit_code = EXIT_IO
