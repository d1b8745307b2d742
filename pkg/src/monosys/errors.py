"""Exception hierarchy shared by all monosys modules."""


class MonosysError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimensionError(MonosysError, ValueError):
    pass


class DimensionMismatchError(MonosysError, ValueError):
    pass


class NonFiniteError(MonosysError, ValueError):
    pass


class ParameterOutOfBoxError(MonosysError, ValueError):
    pass


class InvalidConstantError(MonosysError, ValueError):
    pass


class NotPositiveDefiniteError(MonosysError, ValueError):
    pass


class InadmissibleLambdaError(MonosysError, ValueError):
    """lambda lies outside (or on the boundary of) the admissible interval."""

    def __init__(self, lam, interval, message=None):
        self.lam = lam
        self.interval = interval
        super().__init__(message or f"lambda={lam:.17g} is outside the admissible interval {interval}")


class NotStronglyMonotoneError(InadmissibleLambdaError):
    pass


class ConvergenceError(MonosysError, RuntimeError):
    pass


class MaxIterationsExceeded(ConvergenceError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations (last residual {residual:.3e})")


class DivergenceError(ConvergenceError):
    def __init__(self, iteration):
        self.iteration = iteration
        super().__init__(f"non-finite iterate detected at iteration {iteration}")


class ConfigError(MonosysError, ValueError):
    pass
