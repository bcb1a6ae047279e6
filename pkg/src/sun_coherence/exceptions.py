class NumericalAbort(RuntimeError):
    """A propagation was stopped because the numbers stopped being trustworthy."""


class NonFiniteStateError(NumericalAbort):
    pass


class TraceDriftError(NumericalAbort):
    pass


class SingularityError(NumericalAbort):
    """Wei-Norman parameters reached ``|cos u2|`` below the singularity floor."""

    def __init__(self, message, time=None, upsilon2=None):
        super().__init__(message)
        self.time = time
        self.upsilon2 = upsilon2


class NonCommutingError(ValueError):
    """The equation-of-motion family does not commute with itself at different times."""
