"""Exception types raised by fockrel."""


class FockrelError(Exception):
    """Base class for all fockrel errors."""


class DimensionMismatchError(FockrelError, ValueError):
    pass


class TruncationOverflowError(FockrelError, OverflowError):
    """A truncation would push an intermediate magnitude past the float range guard."""


class InvalidSymbolError(FockrelError, ValueError):
    pass


class InvalidConjugationError(FockrelError, ValueError):
    """Conjugation parameters violate one or more of the admissibility clauses.

    ``violations`` holds one human-readable clause per failed condition.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid conjugation parameters: " + "; ".join(self.violations))
