"""Exception hierarchy.

Each class carries the process exit code the CLI maps it to.
"""


class PCEError(Exception):
    exit_code = 1


class ConfigError(PCEError):
    exit_code = 2


class DataError(PCEError, ValueError):
    exit_code = 3


class DomainError(DataError):
    """A value lies outside the support of its marginal or polynomial family."""

    def __init__(self, message, variable=None, row=None):
        super().__init__(message)
        self.variable = variable
        self.row = row


class NumericalError(PCEError, ArithmeticError):
    exit_code = 4


class SingularSystemError(NumericalError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DegenerateLeverageError(NumericalError):
    pass


class CorrectionUndefinedError(NumericalError):
    pass


class UndefinedMetricError(NumericalError):
    pass


class TrainingError(NumericalError):
    pass


class SizeError(PCEError, OverflowError):
    exit_code = 2
