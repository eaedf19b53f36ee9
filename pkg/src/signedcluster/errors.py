"""Exception hierarchy shared by every module."""


class SignedClusterError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SignedClusterError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(SignedClusterError):
    """A problem is too large for the requested exhaustive method."""


class ConfigurationError(SignedClusterError, ValueError):
    """Solver or CLI configuration is malformed or names an unknown backend."""


class IngestionError(SignedClusterError, ValueError):
    """A price file cannot be turned into a valid panel."""


class NumericalError(SignedClusterError, ArithmeticError):
    """A numerical routine failed to converge or produced non-finite output."""
