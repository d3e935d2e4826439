class SfwmError(Exception):
    """Base class of every error raised by taper_sfwm."""


class DomainError(SfwmError, ValueError):
    """An input lies outside the validity domain of a model."""


class EnergyConservationError(SfwmError, ValueError):
    """A pump pair does not satisfy w_p1 + w_p2 = w_s + w_i."""


class PropagationOverflowError(SfwmError, ArithmeticError):
    """The accumulated transfer matrix grew beyond a physical gain."""


class OracleAccuracyError(SfwmError, ArithmeticError):
    """The ODE oracle could not meet its error tolerance."""


class ConfigError(SfwmError, ValueError):
    """The run configuration violates its schema."""


class CouplingStrengthWarning(UserWarning):
    """An element coupling |f| is large enough to degrade the first-order element matrix."""
