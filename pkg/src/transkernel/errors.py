"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: validation and configuration problems
exit with 2, data-format problems with 3, numerical failures with 4.
"""


class TranskernelError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(TranskernelError):
    """Invalid inputs or a violated operation contract."""

    exit_code = 2


class ConfigError(ValidationError):
    """Invalid configuration (CLI flags or experiment config files)."""

    exit_code = 2


class DataFormatError(TranskernelError):
    """Malformed or corrupt on-disk data (corpora, matrices, models)."""

    exit_code = 3


class NumericalError(TranskernelError):
    """A numerical solver or factorization failed."""

    exit_code = 4
