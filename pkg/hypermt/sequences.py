"""Explicit test-function families: the psi_k lower-bound family and the
concentrating Moser sequence u_k, with their normalizations.

psi_k(x) = (1 - |x|^2)^beta_k on the Poincare ball, beta_k = (n-1)/n + 1/(nk).
u_k is constant on B_g(0, e^-k), logarithmic in the geodesic radius out to
rho = 1 and zero beyond.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.special import betaln

from .config import SEQUENCE_PATTERNS
from .errors import DomainError, HyperMTError, OverflowRegimeError
from .functionals import LOG_MAX, log_phi_n, phi_n
from .geometry import DimensionContext, log_phi, phi, polar_integral_result
from .precision import Precision, extended_context
from .profiles import HyperbolicRadialFunction
from .quadrature import QuadResult, integrate, log_graded_edges

logger = logging.getLogger(__name__)

# Below this, sinh(x)/x = 1 + x^2/6 to double precision
SINHC_SERIES_CUTOFF = 1e-4

# Past e^-DEEP_SHELL the volume element omega sinh^(n-1)(rho) rho equals omega rho^n in double
DEEP_SHELL = 400.0


def beta(a: float, b: float, precision: Precision = Precision.DOUBLE) -> float:
    """B(a, b) through log-gamma, stable for small a"""
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"Beta function needs a, b > 0, got a={a}, b={b}")
    if Precision.parse(precision) is Precision.EXTENDED:
        with extended_context(10):
            return mpmath.beta(mpmath.mpf(a), mpmath.mpf(b))
    return math.exp(betaln(a, b))


def beta_ratio(k: float, n: int) -> float:
    """B(1/k, n) / B(1/k, n/2), which tends to 1 as k grows"""
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    return math.exp(betaln(1.0 / k, n) - betaln(1.0 / k, n / 2.0))


def _psi_exponent(n: int, k: float) -> float:
    return (n - 1) / n + 1.0 / (n * k)


def _check_lambda(ctx: DimensionContext, lam: float) -> None:
    if lam < 0.0 or lam >= ctx.hardy:
        raise DomainError(f"lambda must lie in [0, {ctx.hardy}), got {lam}")


@dataclass(frozen=True)
class PsiKRecord:
    n: int
    k: float
    lam: float
    ln_norm_closed: float
    energy_closed: float
    a_k_n: float
    product: float
    limit_target: float
    ln_norm_quadrature: Optional[float] = None
    energy_quadrature: Optional[float] = None

    @property
    def limit_gap(self) -> float:
        return self.product - self.limit_target

    def as_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record["limit_gap"] = self.limit_gap
        return record


def psi_k_closed_forms(ctx: DimensionContext, k: float, lam: float = 0.0) -> PsiKRecord:
    """Beta-function values of int psi_k^n, int |grad psi_k|^n and the a_k normalization"""
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    _check_lambda(ctx, lam)
    n = ctx.n
    exponent = _psi_exponent(n, k)
    prefactor = ctx.omega * 2.0 ** (n - 1)
    ln_norm_closed = prefactor * beta(1.0 / k, n / 2.0)
    energy_closed = prefactor * exponent**n * beta(1.0 / k, n)
    denominator = exponent**n * beta_ratio(k, n) - lam
    if denominator <= 0.0:
        raise DomainError(f"Normalization of psi_k degenerates at k={k}, lambda={lam}")
    product = 1.0 / denominator
    return PsiKRecord(
        n=n,
        k=k,
        lam=lam,
        ln_norm_closed=ln_norm_closed,
        energy_closed=energy_closed,
        a_k_n=product / ln_norm_closed,
        product=product,
        limit_target=1.0 / (ctx.hardy - lam),
    )


def psi_k_quadrature(ctx: DimensionContext, k: float) -> Tuple[QuadResult, QuadResult]:
    """Direct radial quadrature of int psi_k^n dVol_g and int |grad_g psi_k|_g^n dVol_g

    |grad_g psi_k|_g = (1 - r^2)/2 |psi_k'(r)| = beta_k r (1 - r^2)^beta_k; the
    (1 - r)^(-1 + 1/k) endpoint factor is handled by QUADPACK's algebraic weight.
    """
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    n = ctx.n
    power = -1.0 + 1.0 / k
    exponent = _psi_exponent(n, k)
    prefactor = ctx.omega * 2.0**n

    def norm_integrand(r: float) -> float:
        return (1.0 + r) ** power * r ** (n - 1)

    def energy_integrand(r: float) -> float:
        return (1.0 + r) ** power * r ** (2 * n - 1)

    weight = {"weight": "alg", "wvar": (0.0, power)}
    norm = integrate(norm_integrand, 0.0, 1.0, **weight).scaled(prefactor)
    energy = integrate(energy_integrand, 0.0, 1.0, **weight).scaled(prefactor * exponent**n)
    return norm, energy


def psi_k_sweep(
    ctx: DimensionContext,
    k_values: Optional[Sequence[float]] = None,
    lam: float = 0.0,
    with_quadrature: bool = True,
) -> List[PsiKRecord]:
    if k_values is None:
        k_values = SEQUENCE_PATTERNS["psi_k"]["k_values"]
    records = []
    for k in sorted(k_values):
        record = psi_k_closed_forms(ctx, k, lam)
        if with_quadrature:
            try:
                norm, energy = psi_k_quadrature(ctx, k)
            except HyperMTError as e:
                logger.error(f"psi_k quadrature failed at n={ctx.n}, k={k}: {e}")
                raise
            record = PsiKRecord(
                **{
                    **asdict(record),
                    "ln_norm_quadrature": norm.value,
                    "energy_quadrature": energy.value,
                }
            )
        logger.debug(f"psi_k n={ctx.n} k={k}: product {record.product:.12g}")
        records.append(record)
    return records


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Least-squares fit of y = C x^exponent in log-log space; returns (exponent, C)"""
    xs = np.asarray(xs, dtype=float)
    ys = np.abs(np.asarray(ys, dtype=float))
    if xs.size < 2 or xs.size != ys.size:
        raise DomainError("Power-law fit needs at least two paired points")
    if np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise DomainError("Power-law fit needs positive abscissae and non-zero ordinates")
    exponent, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(exponent), float(math.exp(intercept))


def lower_bound(ctx: DimensionContext, lam: float = 0.0) -> float:
    """alpha_n^(n-1) / (n-1)! / (hardy - lambda)"""
    _check_lambda(ctx, lam)
    n = ctx.n
    return ctx.alpha ** (n - 1) / math.factorial(n - 1) / (ctx.hardy - lam)


@dataclass(frozen=True)
class MtLowerBoundRecord:
    n: int
    k: float
    lam: float
    value: float
    first_term_bound: float
    limit: float

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _phi_n_over_leading(n: int, x: float) -> float:
    """Phi_n(x) / x^(n-1), continuous at 0"""
    if x < 1e-100:
        return 1.0 / math.factorial(n - 1)
    return phi_n(n, x) / x ** (n - 1)


def mt_lower_bound_sequence(
    ctx: DimensionContext, k: float, lam: float = 0.0
) -> MtLowerBoundRecord:
    """int Phi_n(alpha_n |a_k psi_k|^(n/(n-1))) dVol_g for the normalized psi_k

    The value dominates alpha_n^(n-1)/(n-1)! a_k^n int psi_k^n, which tends to
    lower_bound(lambda) as k grows.
    """
    record = psi_k_closed_forms(ctx, k, lam)
    n = ctx.n
    q = n / (n - 1)
    power = -1.0 + 1.0 / k
    exponent = _psi_exponent(n, k)
    scale = ctx.alpha * record.a_k_n ** (1.0 / (n - 1))
    if scale > LOG_MAX:
        raise OverflowRegimeError(
            f"psi_k integrand leaves double range at k={k}", log_magnitude=scale
        )

    def integrand(r: float) -> float:
        x = scale * (1.0 - r * r) ** (exponent * q)
        return (1.0 + r) ** power * r ** (n - 1) * _phi_n_over_leading(n, x)

    result = integrate(integrand, 0.0, 1.0, weight="alg", wvar=(0.0, power))
    value = ctx.omega * 2.0**n * scale ** (n - 1) * result.value
    first_term = ctx.alpha ** (n - 1) / math.factorial(n - 1) * record.product
    return MtLowerBoundRecord(
        n=n, k=k, lam=lam, value=value, first_term_bound=first_term, limit=lower_bound(ctx, lam)
    )


@dataclass(frozen=True)
class MoserIntegrals:
    """The three pieces of the constraint, without the C_k^n factor

    energy     = 1/k int_{e^-k}^1 t^-n sinh^(n-1) t dt
    inner_norm = k^(n-1) int_0^{e^-k} sinh^(n-1) t dt
    outer_norm = 1/k int_{e^-k}^1 (-ln t)^n sinh^(n-1) t dt
    """

    energy: float
    inner_norm: float
    outer_norm: float

    @property
    def norm(self) -> float:
        return self.inner_norm + self.outer_norm


def _check_k(k: float) -> None:
    if k < 2:
        raise DomainError(f"Moser sequence needs k >= 2, got {k}")


def _sinhc(x: float) -> float:
    """sinh(x) / x, continuous at 0"""
    if x < SINHC_SERIES_CUTOFF:
        return 1.0 + x * x / 6.0
    return math.sinh(x) / x


def log_inner_phi(ctx: DimensionContext, k: float) -> float:
    """log Phi(e^-k), also past the point where e^-k underflows"""
    r = math.exp(-k)
    if r > 0.0:
        return log_phi(ctx, r)
    # Phi(r) = r^n (1 + O(r^2))
    return -ctx.n * k


def moser_integrals(ctx: DimensionContext, k: float) -> MoserIntegrals:
    """Evaluated with t = e^-s, which turns both outer integrals into smooth ones on [0, k]"""
    _check_k(k)
    n, m = ctx.n, ctx.m
    edges = np.linspace(0.0, k, int(math.ceil(k)) + 1)

    try:
        energy = integrate(
            lambda s: _sinhc(math.exp(-s)) ** m, 0.0, k, breakpoints=edges[1:-1]
        )
        outer = integrate(
            lambda s: s**n * math.sinh(math.exp(-s)) ** m * math.exp(-s),
            0.0,
            k,
            breakpoints=edges[1:-1],
        )
    except HyperMTError as e:
        logger.error(f"Moser integrals failed at k={k}: {e}")
        raise
    inner = k ** (n - 1) * phi(ctx, math.exp(-k)) / n
    return MoserIntegrals(energy=energy.value / k, inner_norm=inner, outer_norm=outer.value / k)


def _normalization(ctx: DimensionContext, k: float) -> Tuple[float, MoserIntegrals]:
    integrals = moser_integrals(ctx, k)
    bracket = integrals.energy - ctx.hardy * integrals.norm
    if bracket <= 0.0:
        raise DomainError(f"Moser constraint has no positive normalization at k={k}")
    return bracket ** (-1.0 / ctx.n), integrals


def moser_C_k(ctx: DimensionContext, k: float) -> float:
    """C_k such that ||grad_g u_k||^n - hardy ||u_k||^n = 1"""
    return _normalization(ctx, k)[0]


@dataclass(frozen=True)
class MoserSequence:
    """Exact u_k on the geodesic radius; scale = C_k gives the normalized member"""

    ctx: DimensionContext
    k: float
    scale: float = 1.0

    @property
    def plateau(self) -> float:
        n = self.ctx.n
        return self.ctx.omega ** (-1.0 / n) * self.scale * self.k ** ((n - 1) / n)

    @property
    def inner_radius(self) -> float:
        return math.exp(-self.k)

    def value(self, rho: float) -> float:
        if rho < self.inner_radius:
            return self.plateau
        if rho >= 1.0:
            return 0.0
        return self.plateau * (-math.log(rho)) / self.k

    def derivative(self, rho: float) -> float:
        if rho < self.inner_radius or rho >= 1.0:
            return 0.0
        return -self.plateau / (self.k * rho)

    def sampled(self, samples: int = 64) -> HyperbolicRadialFunction:
        """Piecewise-linear interpolant on geometric nodes between e^-k and 1"""
        radii = log_graded_edges(self.inner_radius, 1.0, samples)
        inner = [min(self.plateau, self.value(r)) for r in radii[:-1]]
        values = [self.plateau] + inner + [0.0]
        return HyperbolicRadialFunction(np.concatenate(([0.0], radii)), values)


def moser_profile(ctx: DimensionContext, k: float, samples: int = 64) -> HyperbolicRadialFunction:
    """Pre-normalization shape of u_k; multiply the values by moser_C_k to normalize"""
    _check_k(k)
    return MoserSequence(ctx, k).sampled(samples)


def moser_constraint(ctx: DimensionContext, k: float) -> float:
    """||grad_g u_k||^n - hardy ||u_k||^n by polar quadrature of the normalized u_k"""
    _check_k(k)
    n = ctx.n
    u = MoserSequence(ctx, k, moser_C_k(ctx, k))
    cut = min(k, DEEP_SHELL)
    rho_cut = math.exp(-cut)
    edges = log_graded_edges(rho_cut, 1.0, 4 * int(math.ceil(cut)) + 1)
    inside = edges[1:-1]
    energy = polar_integral_result(
        ctx, lambda t: abs(u.derivative(t)) ** n, 1.0, rho_cut, breakpoints=inside
    ).value
    outer_norm = polar_integral_result(
        ctx, lambda t: u.value(t) ** n, 1.0, rho_cut, breakpoints=inside
    ).value
    if k > cut:
        # e^-k <= rho < e^-cut in s = -ln rho, where dVol_g = omega e^(-ns) ds
        gradient = (u.plateau / k) ** n
        energy += ctx.omega * gradient * (k - cut)
        deep = integrate(lambda s: s**n * math.exp(-n * s), cut, k)
        outer_norm += ctx.omega * gradient * deep.value
    inner_norm = u.plateau**n * ctx.sigma * math.exp(log_inner_phi(ctx, k))
    return energy - ctx.hardy * (inner_norm + outer_norm)


def blowup_lower_bound_trend(ctx: DimensionContext, k: float, alpha: float, p: float) -> float:
    """k^(1 - p(n-1)/n) e^(nk(alpha/alpha_n - 1)), the growth the ratio must dominate"""
    n = ctx.n
    log_value = (1.0 - p * (n - 1) / n) * math.log(k) + n * k * (alpha / ctx.alpha - 1.0)
    return math.exp(log_value) if log_value < LOG_MAX else math.inf


@dataclass(frozen=True)
class MoserKRecord:
    n: int
    k: float
    C_k: float
    alpha: float
    p: float
    ln_norm: float
    log_ratio: float
    ratio: float
    outcome: str

    @property
    def diverged(self) -> bool:
        return self.outcome == "diverged"

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def blowup_ratio(
    ctx: DimensionContext, k: float, alpha: Optional[float] = None, p: Optional[float] = None
) -> MoserKRecord:
    """||u_k||^-n int Phi_n(alpha |u_k|^(n/(n-1))) / (1 + |u_k|)^p dVol_g

    Evaluated on the exact u_k in log space: the plateau value of log Phi_n is
    factored out of both the inner ball and the logarithmic shell.
    """
    _check_k(k)
    n, m = ctx.n, ctx.m
    alpha = ctx.alpha if alpha is None else alpha
    p = n / (n - 1) if p is None else p
    if alpha <= 0.0 or p < 0.0:
        raise DomainError(f"Need alpha > 0 and p >= 0, got alpha={alpha}, p={p}")

    C_k, integrals = _normalization(ctx, k)
    norm = C_k**n * integrals.norm
    u = MoserSequence(ctx, k, C_k)
    q = n / (n - 1)
    slope = u.plateau / k
    log_omega = math.log(ctx.omega)

    def log_integrand_value(x: float) -> float:
        return log_phi_n(n, alpha * x**q) - p * math.log1p(x)

    def log_shell(s: float) -> float:
        # rho = e^-s; dVol_g = omega sinh^(n-1)(rho) rho ds
        x = slope * s
        if x == 0.0:
            return -math.inf
        return log_integrand_value(x) + log_omega + m * (math.log(_sinhc(math.exp(-s))) - s) - s

    edges = np.linspace(0.0, k, int(math.ceil(k)) + 1)
    try:
        plateau_log = (
            log_integrand_value(u.plateau) + math.log(ctx.sigma) + log_inner_phi(ctx, k)
        )
        # Largest term on a grid finer than the panels keeps every exp() below in range
        peak = max(log_shell(s) for s in np.linspace(0.0, k, 4 * int(math.ceil(k)) + 1))
        reference = max(plateau_log, peak)
        outer = integrate(
            lambda s: math.exp(log_shell(s) - reference), 0.0, k, breakpoints=edges[1:-1]
        )
        log_ratio = (
            reference + math.log(math.exp(plateau_log - reference) + outer.value) - math.log(norm)
        )
    except OverflowError as e:
        logger.warning(f"Blow-up ratio left double range at k={k}, alpha={alpha}, p={p}: {e}")
        log_ratio = math.inf
    except HyperMTError as e:
        logger.error(f"Blow-up ratio quadrature failed at k={k}, alpha={alpha}, p={p}: {e}")
        raise

    threshold = SEQUENCE_PATTERNS["moser"]["divergence_threshold"]
    if log_ratio > LOG_MAX:
        ratio, outcome = math.inf, "diverged"
    else:
        ratio = math.exp(log_ratio)
        outcome = "diverged" if ratio > threshold else "finite"
    logger.debug(f"Moser k={k} alpha={alpha:.6g} p={p}: log ratio {log_ratio:.6g} ({outcome})")
    return MoserKRecord(
        n=n,
        k=k,
        C_k=C_k,
        alpha=alpha,
        p=p,
        ln_norm=norm,
        log_ratio=log_ratio,
        ratio=ratio,
        outcome=outcome,
    )
