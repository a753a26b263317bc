"""Source locations, diagnostics, and the exception hierarchy shared by all stages."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Location:
    file: str = "<input>"
    line: int = 1
    column: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """One semantic finding.  Errors always carry a usable location."""

    severity: str  # "error" | "warning"
    code: str
    message: str
    location: Location

    def render(self) -> str:
        return f"{self.location}: {self.severity}[{self.code}]: {self.message}"

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Stable ordering by location (file, line, column)."""
    return sorted(diags, key=lambda d: (d.location.file, d.location.line, d.location.column))


class BitsyntaxError(Exception):
    """Base for every error raised by this package."""


class SourceError(BitsyntaxError):
    """An error tied to a position in a schema source file."""

    def __init__(self, message: str, location: Location):
        super().__init__(f"{location}: {message}")
        self.message = message
        self.location = location


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class IncludeError(BitsyntaxError):
    pass


class SemanticErrors(BitsyntaxError):
    """Raised by analyze() when one or more error diagnostics were produced."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.is_error]
        super().__init__(f"{len(errors)} semantic error(s)")


class StreamError(BitsyntaxError):
    """Bit-level I/O failure (end of stream, range, bad width)."""

    def __init__(self, message: str, bit_position: int):
        super().__init__(f"{message} @ bit {bit_position}")
        self.message = message
        self.bit_position = bit_position


class EndOfStream(StreamError):
    def __init__(self, bit_position: int, wanted: int, available: int):
        super().__init__(
            f"end of stream (wanted {wanted} bits, {available} available)", bit_position
        )
        self.wanted = wanted
        self.available = available


class RunError(BitsyntaxError):
    """Failure while executing a schema over a bitstream."""

    def __init__(self, reason: str, bit_position: int):
        super().__init__(f"@ bit {bit_position}: {reason}")
        self.reason = reason
        self.bit_position = bit_position


class ParseFailure(RunError):
    """Bitstream does not conform while reading."""


class GenerateFailure(RunError):
    """Value document or stream constraints violated while writing."""
