"""Exception hierarchy shared across the package."""


class TruncatedHilbertError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(TruncatedHilbertError):
    """Invalid interval geometry or region-of-interest parameter."""


class QuadratureError(TruncatedHilbertError):
    """Quadrature failed to reach the requested tolerance.

    Carries the last estimate and its error bound so callers can decide
    whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class GridError(TruncatedHilbertError):
    """Discrete operator construction failed (e.g. grid collision)."""


class SpectralError(TruncatedHilbertError):
    """SVD computation or post-processing failed."""


class DomainError(TruncatedHilbertError):
    """Evaluation point outside the validity region of an asymptotic form."""


class BoundNotApplicableError(TruncatedHilbertError):
    """A stability bound was requested outside its validity regime."""


class ConfigError(TruncatedHilbertError):
    """Invalid experiment configuration."""
