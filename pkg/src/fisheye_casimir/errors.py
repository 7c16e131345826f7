"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class CoincidenceError(DomainError):
    """Field and source points are closer than the exclusion radius."""


class StepSizeError(DomainError):
    """A finite-difference stencil would reach a forbidden region."""


class UnsupportedFunctionError(TypeError):
    """A function without a forward-mode rule was applied to a dual number."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate and its error are kept on the exception so
    callers can decide whether the result is still usable.
    """

    def __init__(self, message, value, error):
        super().__init__(f"{message} (value={value!r}, error={error!r})")
        self.value = value
        self.error = error
