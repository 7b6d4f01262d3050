"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class Refusal(RuntimeError):
    """A computation that is well-posed but outside what is implemented or certified."""
