"""Exception and warning types shared across the package.

Every error derives from one of three bases so the CLI can map them to
exit codes: validation problems (1), IO problems (2), numerical failures (3).
"""


class EffortNetError(Exception):
    """Base class for all package errors."""


class ValidationError(EffortNetError, ValueError):
    """Input breaks a documented invariant."""


class NumericalError(EffortNetError, ArithmeticError):
    """A computation could not produce a finite, meaningful result."""


class UndefinedCell(ValidationError, KeyError):
    """A (driver, level) pair has no multiplier in the cost-driver table."""

    def __init__(self, driver, level):
        self.driver = driver
        self.level = level
        super().__init__(f"cost driver {driver} has no multiplier at level {level}")

    def __str__(self):
        return self.args[0]


class NonPositiveSize(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class EmptyDataset(ValidationError):
    pass


class BadCount(ValidationError):
    pass


class NonPositiveSpread(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DuplicateInputs(ValidationError):
    pass


class NonPositiveActual(ValidationError):
    pass


class NonPositiveEstimate(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


class DegenerateFeature(UserWarning):
    """A feature is constant on the training rows, so min-max scaling is undefined."""


class IllConditioned(UserWarning):
    """The RBNN design matrix is numerically close to singular."""
