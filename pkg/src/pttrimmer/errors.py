"""Exception hierarchy shared by all modules."""


class TrimmerError(Exception):
    """Base class for every error raised by pttrimmer."""


class ParameterError(TrimmerError, ValueError):
    """A parameter lies outside its physical or numerical domain."""


class DimensionError(TrimmerError, ValueError):
    """An array has the wrong shape."""


class PhaseMismatchError(TrimmerError):
    """A phase-specific routine was called in the other PT phase."""


class ExceptionalPointError(TrimmerError):
    """Inputs fall inside the exceptional-point guard band.

    No closed form exists there; use the numerical propagators instead
    (``method="rk4"`` or ``method="matrix_exp"``).
    """


class DegenerateConfigurationError(TrimmerError):
    """The analytic spectrum is undefined (zero coupling)."""


class ConvergenceError(TrimmerError):
    """An iterative solver did not converge.

    The best iterate found so far is kept on ``best`` so callers can
    inspect or reuse it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class OverflowGuardError(TrimmerError, OverflowError):
    """Hyperbolic growth would overflow double precision."""


class DivergenceError(TrimmerError):
    """Numerical propagation produced a state norm beyond the cap."""


class GridMismatchError(TrimmerError, ValueError):
    """Two trajectories are not sampled on the same time grid."""
