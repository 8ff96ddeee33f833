"""Exception types shared across the package."""


class ChflowError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ChflowError, ValueError):
    """Invalid configuration: bad parameters, mismatched grids, malformed input."""


class DegenerateMetricError(ChflowError, ValueError):
    """The density block of the inertia operator is not invertible (kappa = 0)."""


class EvaluationError(ChflowError, RuntimeError):
    """A numerical evaluation received or produced an unusable state."""
