"""Submeasure lab - exceptions."""


class LabError(Exception):
    """Base class for all errors raised by submeasure_lab."""


class InvalidInputError(LabError, ValueError):
    """Input is malformed or outside the domain of an operation."""


class LimitExceededError(LabError):
    """A configured size, sweep or trial limit would be exceeded."""

    def __init__(self, what: str, value: int, limit: int):
        """Initialize with the offending quantity."""
        super().__init__(f"{what} is {value}, limit is {limit}")
        self.what = what
        self.value = value
        self.limit = limit


class InfeasibleCoverError(InvalidInputError):
    """The target set is not contained in the union of the candidates."""


class NonUniformCoverError(InvalidInputError):
    """A uniform k-cover was required."""
