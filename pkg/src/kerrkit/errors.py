"""Exception hierarchy shared by the package."""


class KerrkitError(Exception):
    """Base class for all package errors."""


class DomainError(KerrkitError, ValueError):
    """An argument lies outside the physical domain of a model."""


class UnsupportedRegimeError(DomainError):
    """Photon energy at or above the pair-breaking threshold 2*Delta."""


class ParametricThresholdError(KerrkitError, ArithmeticError):
    """Signal response evaluated on the parametric-oscillation pole."""


class FitError(KerrkitError):
    """A fit could not be set up or did not converge."""


class TraceFormatError(KerrkitError, ValueError):
    """A trace or fixture file violates its declared format."""
