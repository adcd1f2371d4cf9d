"""Exception hierarchy shared by all modules."""


class CubicTwistError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CubicTwistError, ValueError):
    """Invalid input or configuration."""


class NumericalError(CubicTwistError, ArithmeticError):
    """A numerical procedure could not meet its accuracy target."""


# eisenstein
class NotCoprimeToThree(ValidationError):
    pass


class NotPrimary(ValidationError):
    pass


class RamifiedModulus(ValidationError):
    pass


# characters
class NotAdmissible(ValidationError):
    pass


class NotCoprime(ValidationError):
    pass


class NotPrimitive(ValidationError):
    pass


# kernels
class QuadratureFailure(NumericalError):
    def __init__(self, message: str, error_estimate: float = float("nan")):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class ContourError(NumericalError):
    pass


class PoleAtArgument(NumericalError):
    pass


# lfunctions
class PoleAtOne(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class MissingLocalData(ValidationError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message: str, m: int | None = None):
        super().__init__(message if m is None else f"{message} [m={m}]")
        self.m = m


class NotACube(ValidationError):
    pass


# moments
class ThresholdTooSmall(ValidationError):
    pass
