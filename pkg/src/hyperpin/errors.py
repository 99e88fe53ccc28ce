"""Exception types shared across the package."""


class HyperpinError(Exception):
    """Base class for all package-specific errors."""


class OverlapError(HyperpinError):
    """Tail and head sets of a hyperedge intersect, or pin head-sets overlap."""


class WeightError(HyperpinError):
    """Hyperedge weights are negative or do not sum to one."""


class SizeError(HyperpinError):
    """A generator was asked for a size it cannot produce."""


class SingularTransform(HyperpinError):
    """The pin-block transform is numerically singular (degenerate weights)."""


class ConvergenceError(HyperpinError):
    """Dense eigensolver failed to converge."""


class IntegrationError(HyperpinError):
    """Variational or reference integration produced non-finite values."""


class BlowupError(HyperpinError):
    """Simulated state norm exceeded the blow-up threshold."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class NotType2Error(HyperpinError):
    """Large-gain stabilizability could not be verified for the model."""


class InfeasibleError(HyperpinError):
    """No selection from the candidate pool can control the network."""


class ExhaustedError(HyperpinError):
    """All candidates were added but the unstable set never emptied."""


class UnknownExample(HyperpinError):
    """Requested a named example that does not exist."""
