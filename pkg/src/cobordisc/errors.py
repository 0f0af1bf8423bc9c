"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input data violates a documented precondition or invariant."""


class InvariantError(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""
