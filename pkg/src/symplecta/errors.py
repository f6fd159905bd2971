"""Exception hierarchy shared by the library and the command-line front end."""

from typing import Any, Dict, Sequence


class SymplectaError(Exception):
    """Base class for every error raised by symplecta.

    Attributes:
        error_type: Stable label used in reports and error records
        exit_code: Process exit code used by the CLI
    """

    error_type = "error"
    exit_code = 1

    def to_dict(self) -> Dict[str, Any]:
        """Return the error as a ``{"message", "type"}`` record."""
        return {"message": str(self), "type": self.error_type}


class ValidationError(SymplectaError, ValueError):
    """Input values violate a documented precondition."""

    error_type = "validation_error"


class NonFiniteError(ValidationError):
    """An input contains NaN or infinity."""

    error_type = "non_finite"


class ConfigError(ValidationError):
    """A configuration or state document could not be parsed."""

    error_type = "config_error"


class NonOrthogonalError(ValidationError):
    """A matrix expected to be orthogonal is not."""

    error_type = "non_orthogonal"


class DimensionTooLargeError(ValidationError):
    """The requested operation is limited to small dimensions."""

    error_type = "dimension_too_large"


class SampleBudgetError(ValidationError):
    """A trajectory would need more samples than allowed."""

    error_type = "sample_budget"


class StepBudgetError(ValidationError):
    """An integration would need more steps than allowed."""

    error_type = "step_budget"


class SqueezeOverflowError(ValidationError):
    """The squeeze normalization G is not representable as a float."""

    error_type = "overflow"


class NoConvergenceError(SymplectaError):
    """The Jacobi eigensolver exhausted its sweep budget."""

    error_type = "no_convergence"


class UnstableModeError(SymplectaError):
    """One or more normal modes have a zero or imaginary frequency.

    Attributes:
        indices: 1-based indices of the offending modes
    """

    error_type = "unstable_mode"
    exit_code = 2

    def __init__(self, message: str, indices: Sequence[int] = ()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)

    def to_dict(self) -> Dict[str, Any]:
        record = super().to_dict()
        record["indices"] = list(self.indices)
        return record


class ComplexLeakageError(SymplectaError):
    """The dynamics map has eigenvalues off the imaginary axis."""

    error_type = "complex_leakage"
    exit_code = 2


class IndefiniteSectionError(SymplectaError):
    """A phase-space section is not an ellipse."""

    error_type = "indefinite_section"
    exit_code = 3


class VerificationError(SymplectaError):
    """At least one oracle check failed."""

    error_type = "verification_failed"
    exit_code = 4
