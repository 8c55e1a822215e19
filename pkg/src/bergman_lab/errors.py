"""Exception types shared across the package."""


class NonInteriorError(ValueError):
    """A point that must lie in the open unit ball does not."""


class PoleError(ValueError):
    """Evaluation requested at a pole (an atom of a measure, or the origin for g)."""


class ValidationError(ValueError):
    """A weight, measure or configuration violates its structural constraints."""


class GramConditioningError(RuntimeError):
    """The Gram matrix is too ill-conditioned (or indefinite) to factorize."""

    def __init__(self, message, condition_estimate=float("inf")):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class InvariantViolation(AssertionError):
    """A proved inequality failed on computed data."""


class CacheMismatchError(ValueError):
    """A persisted model does not match its content hash or the requested weight."""
