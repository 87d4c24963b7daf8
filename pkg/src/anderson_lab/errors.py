"""Exception hierarchy shared by the library and the CLI."""


class AndersonLabError(Exception):
    """Base error for the package."""

    exit_code = 1


class ConfigError(AndersonLabError):
    """Invalid run configuration or out-of-range parameter."""

    exit_code = 2


class SpecMismatchError(AndersonLabError, ValueError):
    """Fields or grids that do not live on the same truncated torus."""

    exit_code = 2


class NumericalError(AndersonLabError):
    """A numerical procedure failed."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An iteration did not reach its tolerance."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ResolutionError(NumericalError):
    """The lattice is too small for the requested construction."""


class OverflowFieldError(NumericalError):
    """A grid evaluation produced non-finite values."""


class BlowUpError(NumericalError):
    """A solution exceeded the configured L-infinity threshold."""

    def __init__(self, message: str, time: float, linf: float):
        super().__init__(message)
        self.time = time
        self.linf = linf


class DomainViolationError(NumericalError, ValueError):
    """Arguments outside the domain of a formula."""


class CheckFailure(AndersonLabError):
    """An invariant check did not pass."""

    exit_code = 4
