"""Exception types shared across the package."""


class EiszerosError(Exception):
    """Base class for all package errors."""


class ParameterError(EiszerosError, ValueError):
    """Invalid mathematical input (bad modulus, parity mismatch, ...)."""


class ToleranceError(EiszerosError, RuntimeError):
    """A series evaluation could not reach the requested tolerance.

    Carries the achieved bound so callers can decide whether the partial
    result is still useful.
    """

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class WindingError(EiszerosError, RuntimeError):
    """Adaptive boundary sampling failed to resolve the phase."""


class BoundaryZeroError(WindingError):
    """A (near-)zero was detected on the integration contour.

    Reported distinctly from a winding count: the count on such a contour
    is not well defined.
    """


class NewtonError(EiszerosError, RuntimeError):
    """Newton refinement failed to converge or tripped a divergence guard."""


class ScanError(EiszerosError, RuntimeError):
    """Recursive zero isolation failed (persistent boundary zero, depth cap)."""


class CertificationError(EiszerosError, RuntimeError):
    """A requested certification (winding count, margin) did not hold."""
