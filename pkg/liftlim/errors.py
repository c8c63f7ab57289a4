"""Exception types raised across liftlim."""

from typing import Any, Optional, Tuple


class LiftlimError(Exception):
    """Base class for every error raised by liftlim."""
    pass


class ParseError(LiftlimError):
    """Malformed word expression or spec file."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is not None and self.column is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        if self.column is not None:
            return f"column {self.column}: {self.message}"
        return self.message


class SpecReferenceError(LiftlimError):
    """A spec file refers to a group, hom or thread that was never defined."""

    def __init__(self, name: str, line: Optional[int] = None):
        self.name = name
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"undefined name '{name}'{where}")


class AlphabetMismatch(LiftlimError):
    """Two values over different generator alphabets were combined."""
    pass


class DimensionMismatch(LiftlimError):
    """Lattice or matrix dimensions do not agree."""
    pass


class InvalidHomomorphism(LiftlimError):
    """A relator of the source does not act trivially in the target."""

    def __init__(self, relator: Any):
        self.relator = relator
        super().__init__(f"relator {relator} does not map to the identity")


class BudgetExceeded(LiftlimError):
    """Coset enumeration ran out of budget.

    Either the index is infinite or the budget is too small; the two cases
    cannot be told apart.
    """

    def __init__(self, partial_cosets: int, reason: str = "coset limit reached"):
        self.partial_cosets = partial_cosets
        self.reason = reason
        super().__init__(
            f"{reason} with {partial_cosets} live cosets "
            "(infinite index or insufficient budget)"
        )


class CoherenceViolation(LiftlimError):
    """The image of a thread entry escapes the entry below it."""

    def __init__(self, stage: int, witness: Any, detail: str = ""):
        self.stage = stage
        self.witness = witness
        self.detail = detail
        message = f"coherence fails between stages {stage} and {stage + 1}: witness {witness}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class IncompatibleModel(LiftlimError):
    """A base model map disagrees with the bonding below it."""

    def __init__(self, issue: str):
        self.issue = issue
        super().__init__(f"base model does not commute with the bondings: {issue}")


class NormalityViolation(LiftlimError):
    """A thread entry is not normal in its stage group."""

    def __init__(self, stage: int, witness: Any):
        self.stage = stage
        self.witness = witness
        super().__init__(f"subgroup at stage {stage} is not normal: {witness} escapes it")


class UnsupportedBackend(LiftlimError):
    """No exact procedure exists for this operation on this backend."""

    def __init__(self, operation: str, backend: str):
        self.operation = operation
        self.backend = backend
        super().__init__(f"{operation} is not supported for the {backend} backend")


class NonCofinal(LiftlimError):
    """An index sequence does not reach arbitrarily deep stages."""
    pass


class UnknownEntry(LiftlimError):
    """No gallery entry carries the requested name."""

    def __init__(self, name: str, known: Tuple[str, ...] = ()):
        self.name = name
        message = f"unknown gallery entry '{name}'"
        if known:
            message += f". Known entries: {', '.join(known)}"
        super().__init__(message)


class ParamOutOfRange(LiftlimError):
    """A gallery parameter lies outside its documented range."""

    def __init__(self, name: str, value: Any, low: int, high: int):
        self.name = name
        self.value = value
        super().__init__(f"parameter {name}={value} outside [{low}, {high}]")
