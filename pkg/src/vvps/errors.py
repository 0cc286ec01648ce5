"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class RefusalError(ValueError):
    """A numerically honest answer cannot be produced for this input.

    Raised e.g. when a truncated series is evaluated too close to the real
    line, where the truncation error would dominate the value.
    """
