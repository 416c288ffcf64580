"""
Exception hierarchy for the workbench.
Engines catch KegelError and turn it into (success, payload, error) tuples.
"""

from typing import Iterable, Optional


class KegelError(Exception):
    """Base class for every error raised by kegelbench"""


class WeightError(KegelError):
    """A weight vector has a negative entry or sums above 1"""


class DimensionError(KegelError):
    """Matrix or vector shapes do not line up"""


class OrderError(KegelError):
    """A sequence that must be ascending is not"""


class ParseError(KegelError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class TypeCheckError(KegelError):
    def __init__(self, rule: str, path: str, message: str):
        self.rule = rule
        self.path = path or "<root>"
        super().__init__(f"[{rule}] at {self.path}: {message}")


class StuckError(KegelError):
    """A closed term is not weak-normal but no reduction rule applies"""


class TypeMismatch(KegelError):
    """A semantic value was used at the wrong type"""

    def __init__(self, message: str, expected: Optional[str] = None, found: Optional[str] = None):
        self.expected = expected
        self.found = found
        if expected is not None:
            message = f"{message}: expected {expected}, found {found}"
        super().__init__(message)
