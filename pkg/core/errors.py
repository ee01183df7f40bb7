"""
Error types for PyShatter
Every library error derives from PyShatterError and from the closest builtin
"""

from typing import Optional, Tuple


class PyShatterError(Exception):
    """Base class for all PyShatter errors"""


class IdenticalPointsError(PyShatterError, ValueError):
    """Two points that should span a line are equal"""


class DuplicatePointError(PyShatterError, ValueError):
    """A configuration lists the same point twice"""

    def __init__(self, first: int, second: int):
        self.indices: Tuple[int, int] = (first, second)
        super().__init__(f"Duplicate point at indices {first} and {second}")


class PointIndexError(PyShatterError, IndexError):
    """An index does not name a point of the configuration"""


class OverlappingSetsError(PyShatterError, ValueError):
    """Two index sets that must be disjoint share elements"""


class SizeLimitError(PyShatterError, ValueError):
    """Input is larger than the configured exhaustive-search limit"""

    def __init__(self, size: int, limit: int, what: str = "points"):
        self.size = size
        self.limit = limit
        super().__init__(f"{size} {what} exceeds the configured limit of {limit}")


class WrongSizeError(PyShatterError, ValueError):
    """An operation defined for a fixed size received another size"""


class PreconditionError(PyShatterError, ValueError):
    """An operation was called outside its precondition"""


class NotShatteredError(PyShatterError, ValueError):
    """A configuration expected to be shattered is not"""

    def __init__(self, message: str, failing_subset: Optional[Tuple[int, ...]] = None):
        self.failing_subset = failing_subset
        super().__init__(message)


class DimensionMismatchError(PyShatterError, ValueError):
    """Flats or vectors of incompatible dimensions were combined"""


class SearchBoundExceededError(PyShatterError, RuntimeError):
    """A search that must terminate within a known bound did not"""


class ClosureViolationError(PyShatterError, ValueError):
    """A family required to be intersection-closed is not"""


class NoContainingSetError(PyShatterError, ValueError):
    """No family member contains the requested set"""


class RationalParseError(PyShatterError, ValueError):
    """A string could not be parsed as an exact rational"""


class MalformedInputError(PyShatterError, ValueError):
    """An input document is not valid JSON or has the wrong shape"""

    def __init__(self, message: str, byte_offset: Optional[int] = None):
        self.byte_offset = byte_offset
        if byte_offset is not None:
            message = f"{message} (at byte offset {byte_offset})"
        super().__init__(message)
