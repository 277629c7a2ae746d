"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, InputDataError -> 2,
RepositoryError -> 3.
"""


class BusFactorError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(BusFactorError):
    """Invalid configuration or parameter value."""


class InputDataError(BusFactorError):
    """Malformed or inconsistent input data (event logs, review/meeting files)."""


class ClockSkewError(InputDataError):
    """An event is timestamped after the analysis instant."""


class RepositoryError(BusFactorError):
    """The repository or branch cannot be read."""
