"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class MelassoError(Exception):
    exit_code = 1


class ConfigError(MelassoError, ValueError):
    """Invalid configuration or parameter combination."""

    exit_code = 2


class ValidationError(MelassoError, ValueError):
    """Input data failed validation (shapes, values, file contents)."""

    exit_code = 3


class NumericError(MelassoError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""

    exit_code = 4


class SimulationError(NumericError):
    pass


class ContractError(MelassoError):
    """A routine was called outside the conditions under which it is defined."""

    exit_code = 4
