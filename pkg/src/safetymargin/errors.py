"""Exception and warning types raised by the package."""


class SafetyMarginError(Exception):
    """Base class for all package errors."""


class ParamError(SafetyMarginError, ValueError):
    """A constructor or operation received parameters outside their bounds."""


class DomainError(SafetyMarginError, ValueError):
    """A welfare function was evaluated outside its domain."""


class EstimationError(SafetyMarginError):
    """An expectation could not be estimated (non-finite or unconverged)."""


class ConvergenceWarning(RuntimeWarning):
    """Monte Carlo sampling hit its sample cap above the target stderr."""


class EmptyPortfolioError(SafetyMarginError, ValueError):
    """Selection was attempted over zero alternatives."""


class SameAlternativeError(SafetyMarginError, ValueError):
    """A pairwise quantity was requested for an alternative against itself."""


class UnsupportedDistributionError(SafetyMarginError, TypeError):
    """The operation needs a finite-support distribution."""


class ScenarioSyntaxError(SafetyMarginError):
    """Scenario text is not well-formed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SchemaError(SafetyMarginError):
    """Scenario document has unknown, missing or mistyped fields."""


class ScenarioValidationError(SafetyMarginError):
    """Scenario document is well-formed but violates model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} violation(s): {lines}")


class FixtureGeometryError(SafetyMarginError):
    """A generated fixture failed its geometry verification."""
