"""Exception taxonomy shared across the package.

Two failure families matter to callers (and to the CLI exit codes):
malformed input/configuration versus a computation that cannot proceed
numerically (degenerate data, divergent integrals).
"""


class GrenfunError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GrenfunError, ValueError):
    """Malformed data, configuration, or arguments (CLI exit code 2)."""


class NumericError(GrenfunError, ArithmeticError):
    """Well-formed input on which the computation is degenerate or
    divergent (CLI exit code 3)."""
