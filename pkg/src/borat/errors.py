class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class ContractViolation(RuntimeError):
    """Raised when a modelling assumption is broken at run time.

    The typical case is a sampled loss below the configured lower bound,
    which means the interpolation assumption does not hold for the objective.
    """


class NumericalError(FloatingPointError):
    """A loss, gradient or iterate became non-finite."""
