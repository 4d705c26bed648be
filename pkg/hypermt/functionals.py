"""Scalar functionals of a rearrangement profile.

Energies of u_g and u_e are written in the measure coordinate s, where v' is
constant on each segment. Polynomial integrands are integrated exactly with a
Gauss-Legendre rule of sufficient degree; the hyperbolic weights go through
adaptive quadrature. Segments are summed in index order.
"""
import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammainc

from .errors import DomainError, OverflowRegimeError, QuadratureError
from .geometry import (
    DimensionContext,
    kernel_at_radius,
    phi,
    phi_inv,
    polar_integral_result,
)
from .precision import sinh_pow
from .profiles import RadialProfile, w_transform
from .quadrature import ZERO, QuadResult, integrate, log_graded_edges

logger = logging.getLogger(__name__)

# exp() overflows past this argument in double precision
LOG_MAX = 709.0
PHI_N_SERIES_TERMS = 40


@dataclass(frozen=True)
class EnergyReport:
    hyperbolic_energy: float
    euclidean_energy: float
    ln_norm: float
    extra_term: float
    quad_error_estimate: float

    def as_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=None)
def _gauss_rule(points: int):
    return leggauss(points)


def _polynomial_segment(y0: float, y1: float, length: float, degree: int) -> float:
    """int over a segment of |y|^degree where y runs linearly from y0 to y1"""
    if length <= 0.0:
        return 0.0
    if degree == 0:
        return length
    if y0 * y1 < 0.0:
        split = y0 / (y0 - y1)
        return _polynomial_segment(y0, 0.0, split * length, degree) + _polynomial_segment(
            0.0, y1, (1.0 - split) * length, degree
        )
    nodes, weights = _gauss_rule(degree // 2 + 1)
    y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * nodes
    return float(0.5 * length * np.dot(weights, np.abs(y) ** degree))


def _require_dimension(n: int) -> int:
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}")
    return int(n)


def ln_norm(v: RadialProfile, n: int) -> float:
    """int_0^inf v(s)^n ds = ||u||_n^n on H^n (and on R^n)"""
    n = _require_dimension(n)
    return math.fsum(
        _polynomial_segment(v0, v1, s1 - s0, n) for s0, s1, v0, v1 in v.segments()
    )


def euclidean_energy(ctx: DimensionContext, v: RadialProfile) -> float:
    """(n sigma_n)^n int |v'|^n (s / sigma_n)^(n-1) ds"""
    n, sigma = ctx.n, ctx.sigma
    total = []
    for (s0, s1, _, _), slope in zip(v.segments(), v.slopes()):
        if slope == 0.0:
            continue
        weight = _polynomial_segment(s0 / sigma, s1 / sigma, s1 - s0, n - 1)
        total.append(abs(slope) ** n * weight)
    return (n * sigma) ** n * math.fsum(total)


def weighted_energy(ctx: DimensionContext, v: RadialProfile) -> float:
    """(n - 1)^n int |v'|^n s^n ds, the lower bound for the kernel term"""
    n = ctx.n
    total = [
        abs(slope) ** n * _polynomial_segment(s0, s1, s1 - s0, n)
        for (s0, s1, _, _), slope in zip(v.segments(), v.slopes())
        if slope != 0.0
    ]
    return (n - 1) ** n * math.fsum(total)


def _radius_knots(ctx: DimensionContext, v: RadialProfile) -> list:
    return [phi_inv(ctx, s / ctx.sigma) for s in v.knots]


def _hyperbolic_energy_t(ctx: DimensionContext, v: RadialProfile) -> QuadResult:
    n = ctx.n
    power = n * n - 1
    radii = _radius_knots(ctx, v)
    total = ZERO
    for i, slope in enumerate(v.slopes()):
        if slope == 0.0:
            continue
        segment = integrate(lambda t: sinh_pow(t, power), radii[i], radii[i + 1])
        total = total + segment.scaled(abs(slope) ** n)
    return total.scaled((n * ctx.sigma) ** (n + 1))


def _hyperbolic_energy_s(ctx: DimensionContext, v: RadialProfile) -> QuadResult:
    n, sigma = ctx.n, ctx.sigma
    power = n * (n - 1)
    total = ZERO
    for (s0, s1, _, _), slope in zip(v.segments(), v.slopes()):
        if slope == 0.0:
            continue
        segment = integrate(lambda s: sinh_pow(phi_inv(ctx, s / sigma), power), s0, s1)
        total = total + segment.scaled(abs(slope) ** n)
    return total.scaled((n * sigma) ** n)


def hyperbolic_energy_result(
    ctx: DimensionContext, v: RadialProfile, route: str = "t"
) -> QuadResult:
    """Dirichlet n-energy of u_g with its quadrature error estimate

    route "t" integrates in the geodesic radius (polar form), route "s" in
    the measure coordinate through Phi^-1; the two are mutual oracles.
    """
    if route == "t":
        return _hyperbolic_energy_t(ctx, v)
    if route == "s":
        return _hyperbolic_energy_s(ctx, v)
    raise DomainError(f"Unknown energy route '{route}'")


def hyperbolic_energy(ctx: DimensionContext, v: RadialProfile, route: str = "t") -> float:
    return hyperbolic_energy_result(ctx, v, route).value


def kernel_energy(ctx: DimensionContext, v: RadialProfile) -> float:
    """(n sigma_n)^n int |v'|^n k(s / sigma_n) ds, the gap between the two energies"""
    n, sigma = ctx.n, ctx.sigma
    radii = _radius_knots(ctx, v)
    m = ctx.m
    total = ZERO
    for i, slope in enumerate(v.slopes()):
        if slope == 0.0:
            continue
        segment = integrate(
            lambda t: kernel_at_radius(ctx, t) * n * sinh_pow(t, m),
            radii[i],
            radii[i + 1],
        )
        total = total + segment.scaled(abs(slope) ** n * sigma)
    return total.value * (n * sigma) ** n


def _extra_term_exact(ctx: DimensionContext, v: RadialProfile) -> float:
    # On a segment v = a + c s one has |w'|^n s^(n-1) = |c s + v / n|^n
    n = ctx.n
    total = []
    for (s0, s1, v0, v1), slope in zip(v.segments(), v.slopes()):
        y0 = slope * s0 + v0 / n
        y1 = slope * s1 + v1 / n
        total.append(_polynomial_segment(y0, y1, s1 - s0, n))
    return (n - 1) ** n * math.fsum(total)


def _extra_term_quadrature(ctx: DimensionContext, v: RadialProfile) -> QuadResult:
    n = ctx.n
    w = w_transform(v, n)
    total = ZERO
    for i, (s0, s1, _, _) in enumerate(v.segments()):
        slope = float(v.slopes()[i])

        def integrand(s: float, slope=slope) -> float:
            derivative = slope * s ** (1.0 / n) + v(s) * s ** (1.0 / n - 1.0) / n
            return abs(derivative) ** n * s ** (n - 1)

        if i == 0:
            # graded panels toward s = 0, where w' ~ s^(1/n - 1)
            first = 1e-12 * v.support
            edges = log_graded_edges(first, s1, 16)
            head = QuadResult(abs(v.sup_value / n) ** n * first, 0.0)
            total = total + head
            for left, right in zip(edges[:-1], edges[1:]):
                total = total + integrate(integrand, left, right)
        else:
            total = total + integrate(integrand, s0, s1)
    return total.scaled((n - 1) ** n)


def extra_term(ctx: DimensionContext, v: RadialProfile, method: str = "exact") -> float:
    """(n - 1)^n int |(v(s) s^(1/n))'|^n s^(n-1) ds"""
    if v.segment_count == 0:
        return 0.0
    if method == "exact":
        return _extra_term_exact(ctx, v)
    if method == "quadrature":
        return _extra_term_quadrature(ctx, v).value
    raise DomainError(f"Unknown extra-term method '{method}'")


def phi_n(n: int, t: float) -> float:
    """Phi_n(t) = e^t - sum_{j <= n-2} t^j / j!"""
    n = _require_dimension(n)
    if t < 0.0:
        raise DomainError(f"Phi_n needs t >= 0, got {t}")
    if t == 0.0:
        return 0.0
    if t < 1.0:
        return _phi_n_series(n, t)
    if t > LOG_MAX:
        return math.inf
    return math.exp(t) * float(gammainc(n - 1, t))


def _phi_n_series(n: int, t: float) -> float:
    term = t ** (n - 1) / math.factorial(n - 1)
    terms = [term]
    for j in range(n, n - 1 + PHI_N_SERIES_TERMS):
        term *= t / j
        terms.append(term)
    return math.fsum(terms)


def log_phi_n(n: int, t: float) -> float:
    n = _require_dimension(n)
    if t < 0.0:
        raise DomainError(f"Phi_n needs t >= 0, got {t}")
    if t == 0.0:
        return -math.inf
    if t < 1.0:
        return math.log(_phi_n_series(n, t))
    return t + math.log(float(gammainc(n - 1, t)))


def phi_n_lower_bound(n: int, t: float) -> float:
    """t^(n-1) / (n-1)!, the first term of Phi_n"""
    return t ** (n - 1) / math.factorial(n - 1)


def _mt_exponent(ctx: DimensionContext, alpha: float, value: float) -> float:
    return alpha * value ** (ctx.n / (ctx.n - 1))


def _guard_overflow(ctx: DimensionContext, v: RadialProfile, alpha: float) -> None:
    exponent = _mt_exponent(ctx, alpha, v.sup_value)
    if exponent > LOG_MAX:
        raise OverflowRegimeError(
            f"Moser-Trudinger integrand leaves double range (exponent {exponent:.1f})",
            log_magnitude=exponent,
        )


def _segment_integral(
    v: RadialProfile, integrand_of_value: Callable[[float], float]
) -> QuadResult:
    total = ZERO
    for s0, s1, v0, v1 in v.segments():
        if v0 == 0.0 and v1 == 0.0:
            continue
        slope = (v1 - v0) / (s1 - s0)
        total = total + integrate(
            lambda s, s0=s0, v0=v0, slope=slope: integrand_of_value(v0 + slope * (s - s0)),
            s0,
            s1,
        )
    return total


def mt_functional(ctx: DimensionContext, v: RadialProfile, alpha: float) -> float:
    """int_{H^n} Phi_n(alpha |u|^(n/(n-1))) dVol_g via the layer cake"""
    if alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    _guard_overflow(ctx, v, alpha)
    n = ctx.n
    return _segment_integral(v, lambda x: phi_n(n, _mt_exponent(ctx, alpha, x))).value


def exact_growth_ratio(
    ctx: DimensionContext,
    v: RadialProfile,
    alpha: Optional[float] = None,
    p: Optional[float] = None,
) -> float:
    """||u||_n^-n int Phi_n(alpha |u|^(n/(n-1))) / (1 + |u|)^p dVol_g"""
    if v.is_zero:
        raise DomainError("Exact-growth ratio is undefined for the zero profile")
    n = ctx.n
    alpha = ctx.alpha if alpha is None else alpha
    p = n / (n - 1) if p is None else p
    if alpha <= 0.0 or p < 0.0:
        raise DomainError(f"Need alpha > 0 and p >= 0, got alpha={alpha}, p={p}")
    _guard_overflow(ctx, v, alpha)
    numerator = _segment_integral(
        v, lambda x: phi_n(n, _mt_exponent(ctx, alpha, x)) / (1.0 + x) ** p
    )
    return numerator.value / ln_norm(v, n)


def integrate_measure_line(v: RadialProfile, psi: Callable[[float], float]) -> float:
    """int_0^inf psi(v(s)) ds"""
    return _segment_integral(v, psi).value


def integrate_hyperbolic(
    ctx: DimensionContext, v: RadialProfile, psi: Callable[[float], float]
) -> float:
    """int_{H^n} psi(u_g) dVol_g with u_g(x) = v(sigma_n Phi(rho(x)))"""
    radii = _radius_knots(ctx, v)
    sigma = ctx.sigma

    def integrand(t: float) -> float:
        value = v(sigma * phi(ctx, t))
        return psi(value) if value > 0.0 else 0.0

    return polar_integral_result(ctx, integrand, radii[-1], breakpoints=radii[1:-1]).value


def integrate_euclidean(
    ctx: DimensionContext, v: RadialProfile, psi: Callable[[float], float]
) -> float:
    """int_{R^n} psi(u_e) dx with u_e(x) = v(sigma_n |x|^n)"""
    n, sigma = ctx.n, ctx.sigma
    radii = (v.knots / sigma) ** (1.0 / n)

    def integrand(r: float) -> float:
        value = v(sigma * r**n)
        return psi(value) * r ** (n - 1) if value > 0.0 else 0.0

    result = integrate(integrand, 0.0, float(radii[-1]), breakpoints=radii[1:-1])
    return ctx.omega * result.value


def energy_report(ctx: DimensionContext, v: RadialProfile) -> EnergyReport:
    """All energy-type functionals of v, with the hyperbolic quadrature error"""
    try:
        hyperbolic = hyperbolic_energy_result(ctx, v)
    except QuadratureError as e:
        logger.error(f"Hyperbolic energy failed for n={ctx.n}: {e}")
        raise
    return EnergyReport(
        hyperbolic_energy=hyperbolic.value,
        euclidean_energy=euclidean_energy(ctx, v),
        ln_norm=ln_norm(v, ctx.n),
        extra_term=extra_term(ctx, v),
        quad_error_estimate=hyperbolic.error,
    )
