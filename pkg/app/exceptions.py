"""
Domain errors. Every message names the precondition that was violated.
"""


class WeightSequenceError(ValueError):
    """Base class for all domain errors (CLI exit status 1, HTTP 422)."""


class NonFiniteError(WeightSequenceError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"entry {index} is not finite ({value!r}); all entries must be finite")


class ParameterError(WeightSequenceError):
    pass


class HorizonExceededError(WeightSequenceError):
    """Raised when an evaluation needs an index or a quotient beyond the stored horizon."""


class NotLogConvexError(WeightSequenceError):
    pass


class RapidDecayError(WeightSequenceError):
    """The supremum defining a conjugate sequence is unbounded on the grid."""

    def __init__(self, p: float, message: str = ""):
        self.p = p
        super().__init__(
            message
            or f"maximizer for p={p} escapes the right end of the grid; "
            "k*log t + log v(t) is not eventually decreasing (rapid decay violated)"
        )


class GridBoundaryError(WeightSequenceError):
    pass


class InconsistencyError(WeightSequenceError):
    pass


class DegenerateQuotientError(WeightSequenceError):
    pass


class CertificateMismatchError(WeightSequenceError):
    pass


class MalformedInputError(Exception):
    """Input file is not valid JSON or does not match its schema (CLI exit status 2)."""
