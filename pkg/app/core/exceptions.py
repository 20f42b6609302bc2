from typing import Any, Dict, Optional


class QTPDError(Exception):
    """Root of every error raised by the lab. Carries the CLI exit code."""

    exit_code: int = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        if not self.details:
            return self.message
        return f"{self.message} - {self.details}"


# --- Validation failures (exit code 1) ---

class ValidationError(QTPDError, ValueError):
    exit_code = 1


class DimensionMismatchError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    pass


class NotUnitaryError(ValidationError):
    pass


class NotNormalizedError(ValidationError):
    pass


class ThresholdError(ValidationError):
    pass


class SearchTooLargeError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


# --- Numerical failures (exit code 2) ---

class NumericalError(QTPDError, ArithmeticError):
    exit_code = 2


class RankDeficientError(NumericalError):
    """Polar factor is not unique: smallest singular value below tolerance."""


class NullBranchError(NumericalError):
    """Measurement branch with vanishing probability."""


class OracleRequiredError(NumericalError):
    """Quantity needs the B-side factors, which only the classical oracle provides."""


class NonOrthonormalError(NumericalError):
    pass


class ReconstructionError(NumericalError):
    """Decomposition does not reproduce its input within tolerance."""


class BoundViolationError(NumericalError):
    """Achieved approximation error exceeds its analytic bound."""
