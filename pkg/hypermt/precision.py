import enum
import math

import mpmath

from .config import NUMERICS_CONFIG

LOG2 = math.log(2.0)


class Precision(str, enum.Enum):
    DOUBLE = "double"
    EXTENDED = "extended"

    @classmethod
    def parse(cls, value) -> "Precision":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def log_sinh(t: float) -> float:
    """log(sinh t) for t > 0 without overflow"""
    if t <= 0.0:
        return -math.inf
    if t > NUMERICS_CONFIG["log_space_threshold"]:
        return t - LOG2 + math.log1p(-math.exp(-2.0 * t))
    return math.log(math.sinh(t))


def sinh_pow(t: float, p: float) -> float:
    """(sinh t)^p, evaluated in log-space past the threshold"""
    if p == 0:
        return 1.0
    if t <= 0.0:
        return 0.0
    if t > NUMERICS_CONFIG["log_space_threshold"]:
        log_value = p * log_sinh(t)
        if log_value > 709.0:
            return math.inf
        return math.exp(log_value)
    return math.sinh(t) ** p


def extended_context(extra_digits: int = 0):
    """Context manager raising mpmath working precision; never lowers an enclosing one"""
    target = NUMERICS_CONFIG["extended_dps"] + max(0, int(extra_digits))
    return mpmath.workdps(max(mpmath.mp.dps, target))
