"""Exception types shared across the package.

Each class carries the CLI exit code of its category: 2 input/IO,
3 configuration or data-shape problems, 4 evaluation degeneracies,
5 numerical aborts.
"""


class UltradenseError(Exception):
    exit_code = 1


# -- input / IO (exit 2) --

class IoError(UltradenseError):
    """Filesystem failure, reported with the offending path."""
    exit_code = 2


class ParseError(UltradenseError):
    """Malformed input file; message carries path plus line or byte offset."""
    exit_code = 2


class DuplicateWord(UltradenseError):
    exit_code = 2


class InvalidValue(UltradenseError):
    """Non-finite or otherwise out-of-domain numeric data."""
    exit_code = 2


class LabelDomainError(UltradenseError):
    """Label outside the domain the resource kind allows."""
    exit_code = 2


# -- configuration / data shape (exit 3) --

class ConfigError(UltradenseError):
    exit_code = 3


class InvalidMatrix(UltradenseError):
    exit_code = 3


class InvalidDimension(UltradenseError):
    exit_code = 3


class DimensionMismatch(UltradenseError):
    exit_code = 3


class EmptyResource(UltradenseError):
    exit_code = 3


class InsufficientVocabulary(UltradenseError):
    exit_code = 3


class EmptyIntersection(UltradenseError):
    exit_code = 3


class MissingClass(UltradenseError):
    """A split or batch request cannot be satisfied with both label classes."""
    exit_code = 3


class OverlappingSubspaces(UltradenseError):
    exit_code = 3


class UnknownProperty(UltradenseError):
    exit_code = 3


class NeedsLinearMap(UltradenseError):
    """Scalar scores from a multi-dimensional subspace require a fitted map."""
    exit_code = 3


# -- evaluation degeneracies (exit 4) --

class UndefinedCorrelation(UltradenseError):
    exit_code = 4


class DegenerateInput(UltradenseError):
    exit_code = 4


# -- numerical aborts (exit 5) --

class DegenerateMatrix(UltradenseError):
    """Rank-deficient matrix where orthogonality was expected; during
    training this means the transformation was destroyed by a bad step."""
    exit_code = 5
