"""Exception types shared across the package."""


class VerspaceError(Exception):
    """Base class for all package errors."""


class ConfigError(VerspaceError):
    """Invalid experiment configuration (unknown keys, bad values)."""


class DataError(VerspaceError):
    """Dataset could not be loaded or is malformed."""


class InfeasibleConstraintsError(VerspaceError):
    """No strictly feasible weight vector was found for the constraint cone."""


class ChainNumericalError(VerspaceError):
    """A constraint was violated beyond rounding tolerance; the chain is invalid."""


class NumericalUnderflowError(VerspaceError):
    """A computation lost all mass to floating-point underflow."""
