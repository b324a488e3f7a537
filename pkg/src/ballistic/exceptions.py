"""Exception hierarchy.

Every error raised for bad input derives from :class:`BallisticError`, which is
also a :class:`ValueError` so callers that already catch ``ValueError`` keep
working.
"""


class BallisticError(ValueError):
    """Base class for all input errors raised by this package."""


class ValidationError(BallisticError):
    """A distance matrix or point set failed validation."""


class NonSquareError(ValidationError):
    pass


class NegativeEntryError(ValidationError):
    pass


class AsymmetricBeyondToleranceError(ValidationError):
    pass


class NonFiniteEntryError(ValidationError):
    pass


class NonzeroDiagonalError(ValidationError):
    pass


class ZeroNormRowError(ValidationError):
    pass


class EmptyGroupError(BallisticError):
    pass


class LabelCountMismatchError(BallisticError):
    pass


class UnsortedInputError(BallisticError):
    pass


class LengthMismatchError(BallisticError):
    pass


class DimensionMismatchError(BallisticError):
    pass


class TooFewVariablesError(BallisticError):
    pass


class EmptyNullSampleError(BallisticError):
    pass


class UnknownScenarioError(BallisticError):
    pass

__all__ = [
    "BallisticError",
    "ValidationError",
    "NonSquareError",
    "NegativeEntryError",
    "AsymmetricBeyondToleranceError",
    "NonFiniteEntryError",
    "NonzeroDiagonalError",
    "ZeroNormRowError",
    "EmptyGroupError",
    "LabelCountMismatchError",
    "UnsortedInputError",
    "LengthMismatchError",
    "DimensionMismatchError",
    "TooFewVariablesError",
    "EmptyNullSampleError",
    "UnknownScenarioError",
]
