"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameter or scenario configuration."""


class SimulationFault(RuntimeError):
    """Grid state became non-finite; the run is halted with a diagnostic."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class LatencyViolationError(ValueError):
    """An actuation was scheduled to take effect in the simulated past."""


class DegenerateWeightsError(RuntimeError):
    """Every particle likelihood underflowed to zero for a measurement."""
