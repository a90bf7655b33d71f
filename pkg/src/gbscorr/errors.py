"""Exception types shared across the package."""


class GBSCorrError(Exception):
    """Base class for all package errors."""


class ParameterError(GBSCorrError, ValueError):
    """Invalid user-supplied parameter (bad mode count, negative squeezing, ...)."""


class NumericalDomainError(GBSCorrError, ArithmeticError):
    """A quantity is mathematically undefined for the given inputs."""


class UnsupportedFeatureError(GBSCorrError, NotImplementedError):
    """Valid input that this package deliberately does not handle."""
