"""Exception types shared across the package."""


class FanoBalanceError(Exception):
    """Base class for all package errors."""


class InconsistentSamples(FanoBalanceError):
    """Surplus interpolation samples do not lie on the fitted polynomial.

    Signals non-polynomial input, e.g. a quasi-polynomial weight sum or a
    wrong degree request.
    """


class DegenerateNorm(FanoBalanceError):
    """The leading coefficient of a norm expansion vanishes (trivial-like
    configuration)."""


class NotProduct(FanoBalanceError):
    """Operation requires a product test configuration."""


class TailTolerance(FanoBalanceError):
    """Quadrature tail estimate cannot reach the requested tolerance."""


class NumericalUnderflow(FanoBalanceError):
    """All exponential terms of a potential underflowed (box too large for
    the working precision)."""


class NonConvergence(FanoBalanceError):
    """Fixed-point iteration did not converge; carries the full trace for
    diagnosis."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NonMonotone(FanoBalanceError):
    """Slope series decreased beyond tolerance; signals quadrature failure."""
