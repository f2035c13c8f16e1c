"""Exceptions for guided-wave damage classification operations."""

class GWDamageError(Exception):
    """Base exception for gwdamage errors."""
    exit_code = 1

class ConfigurationError(GWDamageError):
    """Raised when configuration is invalid."""
    exit_code = 2

class DataError(GWDamageError):
    """Raised when input data violates a contract."""
    exit_code = 3

class SignalValidationError(DataError):
    """Raised when a time series is malformed (too short, non-finite, bad dt)."""
    pass

class TruncationError(DataError):
    """Raised when a delayed pulse would run past the end of the record."""
    pass

class BaselinePairingError(DataError):
    """Raised when monitoring series cannot be paired with a baseline."""

    def __init__(self, message: str, unpaired: list[str] | None = None):
        super().__init__(message)
        self.unpaired = unpaired or []

class IngestError(DataError):
    """Raised when an ingested CSV is rejected."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line

class ConstantFeatureError(DataError):
    """Raised when a correlation is requested on a zero-variance column."""
    pass

class FeatureSelectionError(DataError):
    """Raised when feature filtering would leave no features."""
    pass

class NumericalError(GWDamageError):
    """Raised when a numerical routine fails."""
    exit_code = 4

class ConvergenceError(NumericalError):
    """Raised when an iterative optimizer does not converge."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations

class WaveletError(NumericalError):
    """Raised when a wavelet filter or decomposition request cannot be satisfied."""
    pass
