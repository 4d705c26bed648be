"""Adaptive quadrature wrappers.

All integrals go through scipy's QUADPACK (adaptive Gauss-Kronrod refinement of
Gauss-Legendre panels). Accuracy warnings are turned into either a logged
warning (soft loss) or a QuadratureError (hard failure), never silently dropped.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .config import NUMERICS_CONFIG
from .errors import QuadratureError

logger = logging.getLogger(__name__)

# A warned result is still accepted when its error estimate is within this
# factor of the requested tolerance.
SOFT_FAILURE_FACTOR = 1e3


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(self.value + other.value, self.error + other.error)

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(self.value * factor, abs(self.error * factor))


ZERO = QuadResult(0.0, 0.0)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: Optional[float] = None,
    abs_tol: float = 0.0,
    breakpoints: Optional[Iterable[float]] = None,
    weight: Optional[str] = None,
    wvar=None,
    limit: Optional[int] = None,
) -> QuadResult:
    """Integrate f over [a, b], optionally split at breakpoints"""
    if rel_tol is None:
        rel_tol = NUMERICS_CONFIG["tol_quad"]
    if limit is None:
        limit = NUMERICS_CONFIG["quad_limit"]
    if a == b:
        return ZERO
    if breakpoints is not None:
        edges = panel_edges(a, b, breakpoints)
        total = ZERO
        for left, right in zip(edges[:-1], edges[1:]):
            total = total + integrate(
                f, left, right, rel_tol=rel_tol, abs_tol=abs_tol, limit=limit
            )
        return total

    # QUADPACK refuses tolerances below ~50 machine epsilons
    effective_rel = max(rel_tol, 50.0 * np.finfo(float).eps)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = quad(
            f,
            a,
            b,
            epsabs=abs_tol,
            epsrel=effective_rel,
            limit=limit,
            weight=weight,
            wvar=wvar,
        )
    if not math.isfinite(value):
        raise QuadratureError("Non-finite integral", (a, b), error)

    issues = [w for w in caught if issubclass(w.category, IntegrationWarning)]
    if issues:
        allowed = SOFT_FAILURE_FACTOR * max(effective_rel * abs(value), abs_tol)
        if error > allowed:
            raise QuadratureError(
                f"Tolerance not reached: {issues[0].message}", (a, b), error
            )
        logger.debug(f"Soft quadrature accuracy loss on [{a}, {b}]: {error:.3e}")
    return QuadResult(float(value), float(error))


def panel_edges(a: float, b: float, breakpoints: Iterable[float]) -> list:
    inner = sorted(x for x in breakpoints if a < x < b)
    return [a] + inner + [b]


def log_graded_edges(a: float, b: float, count: int) -> np.ndarray:
    """Geometrically graded edges from a > 0 to b"""
    if a <= 0.0 or b <= a:
        raise ValueError(f"Need 0 < a < b for graded edges, got a={a}, b={b}")
    return np.geomspace(a, b, max(2, count))


def integrate_extended(
    f: Callable, a, b, breakpoints: Optional[Sequence] = None
) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """Tanh-sinh quadrature at the current mpmath working precision"""
    nodes = [a] + list(breakpoints or []) + [b]
    value, error = mpmath.quad(f, nodes, error=True)
    if error > NUMERICS_CONFIG["tol_quad_extended"] * max(abs(value), 1):
        raise QuadratureError(
            "Extended quadrature missed its tolerance", (float(a), float(b)), float(error)
        )
    return value, error
