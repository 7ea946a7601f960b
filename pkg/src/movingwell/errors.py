"""Shared exception types."""


class NonConvergenceError(RuntimeError):
    """A numerical routine failed to reach its requested accuracy.

    Raised by adaptive quadrature and by the imaginary-time relaxation when
    the error estimate stalls above tolerance; carries the last residual so
    callers can report it.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
