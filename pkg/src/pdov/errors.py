"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PrecisionError(RuntimeError):
    """A series could not be evaluated to the requested tolerance.

    Raised instead of silently truncating; callers should enlarge the
    coefficient table or relax the tolerance.
    """
