"""Collective free-induction decay from two atomic ensembles in a Mach-Zehnder interferometer."""
from .errors import ConfigError, NumericalError, StabilityError

__version__ = "0.1.0"
__all__ = ["ConfigError", "NumericalError", "StabilityError", "__version__"]
