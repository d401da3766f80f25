"""Exception hierarchy shared by every module in the package."""


class GeoMeasuresError(Exception):
    """Base class for all package errors."""


class NonHermitian(GeoMeasuresError, ValueError):
    pass


class NotPsd(GeoMeasuresError, ValueError):
    pass


class NoConvergence(GeoMeasuresError, RuntimeError):
    pass


class DimensionMismatch(GeoMeasuresError, ValueError):
    pass


class BadParameter(GeoMeasuresError, ValueError):
    pass


class ValidationError(GeoMeasuresError, ValueError):
    """A matrix failed density-matrix validation.

    ``invariant`` names the violated property and ``magnitude`` the size of
    the violation, so callers can report both.
    """

    def __init__(self, invariant: str, magnitude: float, message: str | None = None):
        self.invariant = invariant
        self.magnitude = magnitude
        super().__init__(message or f"{invariant} {_sci(magnitude)}")


def _sci(x: float) -> str:
    """``1.0e-1`` style: one decimal, unpadded exponent."""
    mant, exp = f"{x:.1e}".split("e")
    return f"{mant}e{int(exp)}"


class InconsistentConstraints(GeoMeasuresError, ValueError):
    pass


class SolverError(GeoMeasuresError, RuntimeError):
    """Raised by the measures when the SDP solver cannot produce an answer."""

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


class ParseError(GeoMeasuresError, ValueError):
    pass
