"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericalError -> 3.
"""


class SolarcastError(Exception):
    """Base class for all package errors."""


class ConfigError(SolarcastError):
    """Invalid configuration, arguments, or parameter ranges."""


class DataError(SolarcastError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericalError(SolarcastError):
    """Numerical failure during fitting or prediction."""
