"""Exception types shared across the package."""


class SpinPhaseError(Exception):
    """Base class for all errors raised by this package."""


class PoleSingularity(SpinPhaseError):
    """Polar angle hit 0 or pi, where the azimuthal frame is undefined."""


class ParametrizationError(SpinPhaseError):
    """Curve azimuth is not strictly increasing or is under-resolved."""


class DegenerateField(SpinPhaseError):
    """Field sample with zero (or numerically zero) magnitude."""


class InsufficientResolution(SpinPhaseError):
    """Too few samples for the requested quadrature or derivative."""


class DegenerateDrivingField(SpinPhaseError):
    """Vector-operator expectation vanishes; no driving direction exists."""


class TrackingAmbiguity(SpinPhaseError):
    """No eigenstate has a dominant overlap with the reference state."""


class IntegratorFailure(SpinPhaseError):
    """Norm drift of the propagated state exceeded tolerance."""


class AdiabaticityBroken(SpinPhaseError):
    """Final state lost overlap with the initial state after a closed loop."""


class ConfigError(SpinPhaseError):
    """Invalid or incomplete run configuration."""
