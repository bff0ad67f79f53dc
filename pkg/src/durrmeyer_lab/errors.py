"""Exception hierarchy shared by all modules."""


class DurrmeyerError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DurrmeyerError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class DivergenceError(DomainError):
    """Scale ``n`` too small for the declared growth of ``f``."""


class ExactnessError(DurrmeyerError):
    """The exact engine would have to give up exactness."""


class UnsupportedInputError(DurrmeyerError):
    """Input lies outside the function class an operation handles."""


class CapabilityError(DurrmeyerError):
    """Missing derivative oracle or insufficient jet order."""


class TruncationError(DurrmeyerError):
    """Outer series needs more than ``max_terms`` terms.

    ``partial`` holds the partial sum reached before giving up.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
