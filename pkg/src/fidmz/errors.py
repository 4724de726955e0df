"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """A scenario configuration failed validation."""


class NumericalError(RuntimeError):
    """The integrator could not proceed (stability guard, non-finite state)."""


class StabilityError(NumericalError, ValueError):
    """Time step too large for the fixed-step integrator."""
