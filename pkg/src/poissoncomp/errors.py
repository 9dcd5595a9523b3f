"""Exception types raised by the numerical and sampling routines."""


class PoissonCompError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(PoissonCompError, ArithmeticError):
    """A series or iteration hit its term budget before the stopping rule fired."""


class DivergentSeries(NonConvergence):
    """Series terms stopped decaying, so the representation is not usable here."""


class PrecisionLoss(PoissonCompError, ArithmeticError):
    """An alternating sum cancelled away more than half of the significant digits."""


class DegenerateRates(PoissonCompError, ValueError):
    """Two birth rates coincide, so the partial-fraction form is undefined."""


class InvalidBound(PoissonCompError, ValueError):
    """A rate function exceeded the dominating bound used for thinning."""


class TabulationFailure(PoissonCompError, RuntimeError):
    """A tabulated CDF failed its monotonicity check."""


class DivisionUnderflow(PoissonCompError, ZeroDivisionError):
    """An intermediate continued-fraction denominator was exactly zero."""


class UnknownCheck(PoissonCompError, KeyError):
    """The requested identity check is not registered."""
