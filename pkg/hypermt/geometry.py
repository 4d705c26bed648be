"""Radial geometry of the Poincare ball model.

Phi(r) = n * int_0^r sinh(t)^(n-1) dt is the normalized geodesic ball volume,
Vol_g(B_g(0, r)) = sigma_n * Phi(r).
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Optional, Tuple, Union

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .config import NUMERICS_CONFIG
from .errors import ConvergenceError, DomainError
from .precision import Precision, extended_context, log_sinh, sinh_pow
from .quadrature import QuadResult, integrate, integrate_extended

logger = logging.getLogger(__name__)

Real = Union[float, mpmath.mpf]

# Below this radius Phi is integrated with a fixed Gauss-Legendre rule; above
# it the exponential-sum closed form has no harmful cancellation.
SMALL_RADIUS = 2.0
_GL_NODES, _GL_WEIGHTS = leggauss(32)


@dataclass(frozen=True)
class DimensionContext:
    n: int
    omega: float
    sigma: float
    alpha: float
    hardy: float

    @property
    def m(self) -> int:
        """Exponent of sinh in the volume density"""
        return self.n - 1

    def hardy_extended(self) -> mpmath.mpf:
        n = self.n
        return (mpmath.mpf(n - 1) / n) ** n


@lru_cache(maxsize=None)
def make_context(n: int) -> DimensionContext:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"Dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}")
    omega = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return DimensionContext(
        n=n,
        omega=omega,
        sigma=omega / n,
        alpha=n * omega ** (1.0 / (n - 1)),
        hardy=((n - 1) / n) ** n,
    )


def tau_lambda(ctx: DimensionContext, lam: float) -> float:
    """Gap between the Hardy constant and lambda; must stay positive"""
    if lam < 0.0 or lam >= ctx.hardy:
        raise DomainError(f"lambda must lie in [0, {ctx.hardy}), got {lam}")
    return ctx.hardy - lam


def _check_ball_norm(x_norm: float) -> None:
    if not (0.0 <= x_norm < 1.0):
        raise DomainError(f"Euclidean norm must lie in [0, 1), got {x_norm}")


def geodesic_radius(x_norm: float) -> float:
    """rho(x) = ln((1 + |x|) / (1 - |x|))"""
    _check_ball_norm(x_norm)
    return 2.0 * math.atanh(x_norm)


def euclidean_norm(rho: float) -> float:
    """Inverse of geodesic_radius: |x| = tanh(rho / 2)"""
    if rho < 0.0:
        raise DomainError(f"Geodesic radius must be non-negative, got {rho}")
    return math.tanh(rho / 2.0)


def metric_factor(x_norm: float) -> float:
    """Conformal factor 4 / (1 - |x|^2)^2 of the Poincare metric"""
    _check_ball_norm(x_norm)
    return 4.0 / (1.0 - x_norm * x_norm) ** 2


def volume_element(ctx: DimensionContext, x_norm: float) -> float:
    """Density of dVol_g against Lebesgue measure: 2^n / (1 - |x|^2)^n"""
    _check_ball_norm(x_norm)
    return 2.0**ctx.n / (1.0 - x_norm * x_norm) ** ctx.n


def _check_radius(r) -> None:
    if r < 0:
        raise DomainError(f"Radius must be non-negative, got {r}")


def _sinh_power_sum(m: int, t: float) -> float:
    """int_0^t sinh(x)^m dx from the binomial expansion of sinh^m"""
    total = 0.0
    for j in range(m + 1):
        a = m - 2 * j
        term = math.expm1(a * t) / a if a != 0 else t
        total += (-1) ** j * math.comb(m, j) * term
    return total / 2.0**m


def _log_sinh_power_integral(m: int, t: float) -> float:
    """log of int_0^t sinh(x)^m dx for large t, scaled by exp(m t)"""
    scaled = 0.0
    for j in range(m + 1):
        a = m - 2 * j
        if a != 0:
            term = (math.exp((a - m) * t) - math.exp(-m * t)) / a
        else:
            term = t * math.exp(-m * t)
        scaled += (-1) ** j * math.comb(m, j) * term
    return m * t - m * math.log(2.0) + math.log(scaled)


def _gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b) + half * _GL_NODES
    return float(half * np.dot(_GL_WEIGHTS, f(nodes)))


def _phi_quadrature(ctx: DimensionContext, r: float) -> QuadResult:
    m = ctx.m
    return integrate(lambda t: sinh_pow(t, m), 0.0, r).scaled(ctx.n)


def _phi_extended(ctx: DimensionContext, r) -> mpmath.mpf:
    n, m = ctx.n, ctx.m
    r_float = float(r)
    extra = 10
    if r_float < 1.0:
        extra += int((m + 2) * -math.log10(max(r_float, 1e-300)))
    with extended_context(extra):
        t = mpmath.mpf(r)
        total = mpmath.mpf(0)
        for j in range(m + 1):
            a = m - 2 * j
            term = mpmath.expm1(a * t) / a if a != 0 else t
            total += (-1) ** j * mpmath.binomial(m, j) * term
        return n * total / mpmath.mpf(2) ** m


def _phi_extended_quadrature(ctx: DimensionContext, r) -> mpmath.mpf:
    m = ctx.m
    with extended_context(10):
        value, _ = integrate_extended(lambda t: mpmath.sinh(t) ** m, 0, mpmath.mpf(r))
        return ctx.n * value


def phi(
    ctx: DimensionContext,
    r: Real,
    precision: Precision = Precision.DOUBLE,
    method: str = "auto",
) -> Real:
    """Phi(r) = n * int_0^r sinh^(n-1)

    method="quadrature" forces the adaptive route; "auto" picks closed forms
    where they are cancellation-free.
    """
    _check_radius(r)
    if Precision.parse(precision) is Precision.EXTENDED:
        if method == "quadrature":
            return _phi_extended_quadrature(ctx, r)
        return _phi_extended(ctx, r)
    r = float(r)
    if r == 0.0:
        return 0.0
    if method == "quadrature":
        if r > NUMERICS_CONFIG["log_space_threshold"]:
            return math.exp(log_phi(ctx, r))
        return _phi_quadrature(ctx, r).value
    if ctx.n == 2:
        return 4.0 * sinh_pow(r / 2.0, 2)
    if r > NUMERICS_CONFIG["log_space_threshold"]:
        log_value = log_phi(ctx, r)
        return math.exp(log_value) if log_value < 709.0 else math.inf
    if r <= SMALL_RADIUS:
        m = ctx.m
        return ctx.n * _gauss_legendre(lambda x: np.sinh(x) ** m, 0.0, r)
    return ctx.n * _sinh_power_sum(ctx.m, r)


def log_phi(ctx: DimensionContext, r: float) -> float:
    """log Phi(r), finite for every r > 0"""
    _check_radius(r)
    if r == 0.0:
        return -math.inf
    if r <= NUMERICS_CONFIG["log_space_threshold"]:
        value = phi(ctx, r)
        return math.log(value) if value > 0.0 else ctx.n * math.log(r)
    return math.log(ctx.n) + _log_sinh_power_integral(ctx.m, r)


def phi_derivative(ctx: DimensionContext, r: float) -> float:
    return ctx.n * sinh_pow(r, ctx.m)


def phi_upper_bounds(ctx: DimensionContext, t: float) -> Tuple[float, float]:
    """The two elementary bounds Phi(t) < sinh^n t and Phi(t) < n/(n-1) sinh^(n-1) t"""
    _check_radius(t)
    return sinh_pow(t, ctx.n), ctx.n / (ctx.n - 1) * sinh_pow(t, ctx.m)


def sinh_n_minus_phi(ctx: DimensionContext, t: float) -> float:
    """sinh^n(t) - Phi(t) = n * int_0^t sinh^(n-1) (cosh - 1), without cancellation"""
    _check_radius(t)
    if t == 0.0:
        return 0.0
    if t <= SMALL_RADIUS:
        n, m = ctx.n, ctx.m
        return n * _gauss_legendre(
            lambda x: np.sinh(x) ** m * 2.0 * np.sinh(0.5 * x) ** 2, 0.0, t
        )
    return sinh_pow(t, ctx.n) - phi(ctx, t)


def ball_volume(ctx: DimensionContext, r: float) -> float:
    """Vol_g(B_g(0, r)) = sigma_n Phi(r)"""
    return ctx.sigma * phi(ctx, r)


def phi_inv(
    ctx: DimensionContext, s: Real, precision: Precision = Precision.DOUBLE
) -> Real:
    """Inverse of Phi on [0, inf)"""
    if s < 0:
        raise DomainError(f"Phi^-1 needs s >= 0, got {s}")
    if Precision.parse(precision) is Precision.EXTENDED:
        return _phi_inv_extended(ctx, s)
    s = float(s)
    if s == 0.0:
        return 0.0
    if not math.isfinite(s):
        raise ConvergenceError(f"Cannot invert Phi at non-finite s={s}")
    n, m = ctx.n, ctx.m
    if n == 2:
        return 2.0 * math.asinh(math.sqrt(s) / 2.0)

    # Phi(t) < sinh^n t and Phi(t) < n/(n-1) sinh^(n-1) t give a lower bracket,
    # Phi(t) >= t^n an upper one
    lower = max(math.asinh(s ** (1.0 / n)), math.asinh(((n - 1) * s / n) ** (1.0 / m)))
    upper = max(s ** (1.0 / n), lower * 1.5)
    log_s = math.log(s)

    def residual(t: float) -> float:
        return log_phi(ctx, t) - log_s if t > 0.0 else -math.inf

    grow = 0
    while residual(upper) < 0.0:
        upper *= 2.0
        grow += 1
        if grow > 60:
            raise ConvergenceError(f"Could not bracket Phi^-1({s})")
    shrink = 0
    while residual(lower) > 0.0:
        lower *= 0.5
        shrink += 1
        if shrink > 60:
            raise ConvergenceError(f"Could not bracket Phi^-1({s}) from below")
    try:
        t = brentq(residual, lower, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (RuntimeError, ValueError) as e:
        logger.error(f"Root finding for Phi^-1({s}) failed: {e}")
        raise ConvergenceError(f"Phi^-1({s}) did not converge: {e}") from e

    # Safeguarded Newton polish on the log residual
    slope = phi_derivative(ctx, t) / phi(ctx, t)
    if slope > 0.0 and math.isfinite(slope):
        candidate = t - residual(t) / slope
        if lower <= candidate <= upper and abs(residual(candidate)) < abs(residual(t)):
            t = candidate

    tol = NUMERICS_CONFIG["tol_root"]
    if abs(phi(ctx, t) - s) > tol * max(1.0, s):
        raise ConvergenceError(f"Phi^-1({s}) residual above tolerance at t={t}")
    return t


def _phi_inv_extended(ctx: DimensionContext, s) -> mpmath.mpf:
    s_float = float(s)
    if s_float == 0.0:
        return mpmath.mpf(0)
    start = phi_inv(ctx, s_float) if math.isfinite(s_float) else 1.0
    extra = 10 + int(ctx.m * start / 2.3)
    with extended_context(extra):
        target = mpmath.mpf(s)
        try:
            return mpmath.findroot(
                lambda t: _phi_extended(ctx, t) - target,
                mpmath.mpf(start),
            )
        except (ValueError, ZeroDivisionError) as e:
            raise ConvergenceError(f"Extended Phi^-1({s}) did not converge: {e}") from e


def k_kernel(
    ctx: DimensionContext, s: Real, precision: Precision = Precision.DOUBLE
) -> Real:
    """k(s) = sinh(Phi^-1(s))^(n(n-1)) - s^(n-1)"""
    if s < 0:
        raise DomainError(f"k(s) needs s >= 0, got {s}")
    n = ctx.n
    if Precision.parse(precision) is Precision.EXTENDED:
        t = phi_inv(ctx, s, Precision.EXTENDED)
        with extended_context(10):
            return mpmath.sinh(t) ** (n * (n - 1)) - mpmath.mpf(s) ** (n - 1)
    s = float(s)
    if s == 0.0:
        return 0.0
    if n == 2:
        return s * s / 4.0
    t = phi_inv(ctx, s)
    return kernel_at_radius(ctx, t, s)


def kernel_at_radius(ctx: DimensionContext, t: float, phi_t: Optional[float] = None) -> float:
    """k(Phi(t)) = (sinh^n t)^(n-1) - Phi(t)^(n-1), factored through sinh^n - Phi"""
    n = ctx.n
    if t == 0.0:
        return 0.0
    if t > NUMERICS_CONFIG["log_space_threshold"]:
        # a^(n-1) (1 - (b/a)^(n-1)) with a = sinh^n t > b = Phi(t)
        log_a = n * log_sinh(t)
        log_b = math.log(phi_t) if phi_t is not None and 0.0 < phi_t < math.inf else log_phi(ctx, t)
        log_value = (n - 1) * log_a + math.log1p(-math.exp((n - 1) * (log_b - log_a)))
        return math.exp(log_value) if log_value < 709.0 else math.inf
    b = phi(ctx, t) if phi_t is None else phi_t
    a = sinh_pow(t, n)
    d = sinh_n_minus_phi(ctx, t)
    return d * sum(a**i * b ** (n - 2 - i) for i in range(n - 1))


def polar_integral_result(
    ctx: DimensionContext,
    f: Callable[[float], float],
    t_max: float,
    t_min: float = 0.0,
    breakpoints: Optional[Iterable[float]] = None,
    rel_tol: Optional[float] = None,
) -> QuadResult:
    """omega_{n-1} int f(t) sinh^(n-1) t dt with its error estimate"""
    if t_max < t_min or t_min < 0.0:
        raise DomainError(f"Need 0 <= t_min <= t_max, got [{t_min}, {t_max}]")
    m = ctx.m

    def integrand(t: float) -> float:
        value = f(t)
        if value == 0.0:
            return 0.0
        return value * sinh_pow(t, m)

    result = integrate(integrand, t_min, t_max, rel_tol=rel_tol, breakpoints=breakpoints)
    return result.scaled(ctx.omega)


def polar_integral(
    ctx: DimensionContext,
    f: Callable[[float], float],
    t_max: float,
    t_min: float = 0.0,
    breakpoints: Optional[Iterable[float]] = None,
    rel_tol: Optional[float] = None,
) -> float:
    """Integral of the radial function f(rho(x)) over B_g(0, t_max)"""
    return polar_integral_result(ctx, f, t_max, t_min, breakpoints, rel_tol).value
