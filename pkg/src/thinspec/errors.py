"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Arguments violate a documented precondition (non-finite data, bad shapes, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver did not reach its target tolerance.

    Carries the achieved and requested tolerances so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message, achieved=None, target=None):
        super().__init__(message)
        self.achieved = achieved
        self.target = target


class ResolutionError(RuntimeError):
    """A scan grid was too coarse to separate adjacent spectral features.

    The message states which refinement (grid factor, window) would resolve it.
    """


class InternalConsistencyError(RuntimeError):
    """Two redundant computations of the same quantity disagreed (bug trap)."""


class SchemaError(ValueError):
    """A CSV/JSON input does not carry a recognized schema header."""
