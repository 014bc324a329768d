"""Exception hierarchy shared by every helilqr module."""


class HeliLqrError(Exception):
    """Base class for all errors raised by helilqr."""


class ValidationError(HeliLqrError, ValueError):
    """An input value violates a documented invariant."""


class SchemaError(ValidationError):
    """A parameter or scenario document is missing fields or has unknown ones."""


class DimensionError(ValidationError):
    """Matrix shapes are incompatible with the requested operation."""


class LabelError(ValidationError, KeyError):
    """Unknown or duplicated state/input label."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class ComputationError(HeliLqrError, ArithmeticError):
    """A numerical procedure failed on otherwise valid input."""


class SingularMatrixError(ComputationError):
    pass


class ConvergenceError(ComputationError):
    pass


class NotStableError(ComputationError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= 0."""


class DegenerateSpectrumError(ComputationError):
    pass


class NoStabilizingSolutionError(ComputationError):
    """The Hamiltonian has eigenvalues on the imaginary axis."""


class SubspaceExtractionError(ComputationError):
    pass


class ClosedLoopNotHurwitzError(ComputationError):
    pass


class DivergenceError(ComputationError):
    """State became non-finite or exceeded the magnitude cap."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
