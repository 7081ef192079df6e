"""Exception hierarchy.

Two families matter to callers: ``SurfaceInputError`` means the input is not
an admissible surface (or is otherwise malformed), while ``ConsistencyError``
means an exact identity that must hold failed, which is always a bug.
"""


class ParabolicNFError(Exception):
    """Base class for all package errors."""


class SurfaceInputError(ParabolicNFError, ValueError):
    """Input data is malformed or not an admissible defining function."""


class ConsistencyError(ParabolicNFError, AssertionError):
    """An exact internal identity failed (route disagreement, rank defect...)."""

    def __init__(self, message: str, degree: int | None = None):
        if degree is not None:
            message = f"{message} (degree {degree})"
        super().__init__(message)
        self.degree = degree


class ThresholdUnreachable(ParabolicNFError):
    """The greedy perturbation could not meet a coefficient threshold."""

    def __init__(self, degree: int, rank: int, message: str):
        super().__init__(f"degree {degree} (step {rank}): {message}")
        self.degree = degree
        self.rank = rank
