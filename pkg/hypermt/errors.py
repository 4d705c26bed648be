from typing import Optional, Tuple


class HyperMTError(Exception):
    """Base class for library errors"""


class DomainError(HyperMTError, ValueError):
    """Input outside the domain of an operation"""


class ConfigError(HyperMTError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"Invalid value for '{field}': {message}")
        self.field = field


class ConvergenceError(HyperMTError, RuntimeError):
    """Root bracketing or iteration failed"""


class QuadratureError(HyperMTError, RuntimeError):
    def __init__(
        self,
        message: str,
        interval: Optional[Tuple[float, float]] = None,
        error_estimate: Optional[float] = None,
    ):
        detail = message
        if interval is not None:
            detail += f" on [{interval[0]!r}, {interval[1]!r}]"
        if error_estimate is not None:
            detail += f" (estimated error {error_estimate:.3e})"
        super().__init__(detail)
        self.interval = interval
        self.error_estimate = error_estimate


class OverflowRegimeError(HyperMTError, ArithmeticError):
    """Integrand left the representable range: the blow-up regime"""

    def __init__(self, message: str, log_magnitude: Optional[float] = None):
        super().__init__(message)
        self.log_magnitude = log_magnitude
