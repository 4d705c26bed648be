"""Executable checks for the kernel lemma, the energy comparison and its corollaries."""
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .config import NUMERICS_CONFIG, PROPERTY_PATTERNS, SWEEP_CONFIG
from .errors import DomainError, HyperMTError
from .functionals import (
    euclidean_energy,
    extra_term,
    hyperbolic_energy,
    ln_norm,
)
from .geometry import (
    DimensionContext,
    phi,
    phi_upper_bounds,
    sinh_n_minus_phi,
    tau_lambda,
)
from .precision import Precision, extended_context, sinh_pow
from .profiles import RadialProfile, random_profile

logger = logging.getLogger(__name__)

Real = Any  # float or mpmath.mpf

# Relative agreement of the leading terms past which the double result is
# recomputed in extended precision
CANCELLATION_THRESHOLD = 1e-8
LEMMA_TOLERANCE = 1e-12


@dataclass(frozen=True)
class InequalityCheckResult:
    name: str
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool
    context: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        context: Optional[Dict[str, Any]] = None,
    ) -> "InequalityCheckResult":
        slack = float(lhs) - float(rhs)
        return cls(
            name=name,
            lhs=float(lhs),
            rhs=float(rhs),
            slack=slack,
            tolerance=float(tolerance),
            passed=bool(slack >= -tolerance),
            context=dict(context or {}),
        )

    def as_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record["pass"] = record.pop("passed")
        return record


@dataclass(frozen=True)
class LemmaGrid:
    t_min: float
    t_max: float
    count: int
    spacing: str = "log"

    def __post_init__(self):
        if self.count < 2:
            raise DomainError(f"Grid needs at least 2 points, got {self.count}")
        if self.spacing not in ("log", "linear"):
            raise DomainError(f"Unknown grid spacing '{self.spacing}'")
        if not (0.0 <= self.t_min < self.t_max):
            raise DomainError(f"Need 0 <= t_min < t_max, got ({self.t_min}, {self.t_max}]")
        if self.spacing == "log" and self.t_min <= 0.0:
            raise DomainError("Log-spaced grids need t_min > 0")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, self.count)
        # (t_min, t_max]: the left end is excluded
        return np.linspace(self.t_min, self.t_max, self.count + 1)[1:]

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class LemmaSweepReport:
    n: int
    grid: LemmaGrid
    min_slack_F: float
    argmin_F: float
    min_slack_G: Optional[float]
    min_slack_H: Optional[float]
    equality_deviation: Optional[float]
    small_t_ratio: float
    failures: List[Dict[str, Any]]
    extended_points: int

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> Dict[str, Any]:
        record = asdict(self)
        record["grid"] = self.grid.as_dict()
        record["pass"] = self.passed
        return record


def lemma_grid(
    t_min: Optional[float] = None,
    t_max: Optional[float] = None,
    count: Optional[int] = None,
    spacing: Optional[str] = None,
) -> LemmaGrid:
    defaults = SWEEP_CONFIG["lemma_grid"]
    return LemmaGrid(
        t_min=defaults["t_min"] if t_min is None else t_min,
        t_max=defaults["t_max"] if t_max is None else t_max,
        count=defaults["points"] if count is None else count,
        spacing=defaults["spacing"] if spacing is None else spacing,
    )


def _power_difference(d: float, a: float, b: float, k: int) -> float:
    """a^k - b^k given d = a - b"""
    if k <= 0:
        return 0.0
    return d * math.fsum(a**i * b ** (k - 1 - i) for i in range(k))


def _extra_digits(t: float) -> int:
    return 10 + int(0.9 * t) + int(2 * max(0.0, -math.log10(max(t, 1e-300))))


def _lemma_values_extended(ctx: DimensionContext, t: float) -> Tuple[Real, Real, Real, Real]:
    """(F, G, H, (scale_F, scale_G, scale_H)) with mpmath at raised precision"""
    n = ctx.n
    with extended_context(_extra_digits(t)):
        T = mpmath.mpf(t)
        sh = mpmath.sinh(T)
        ch = mpmath.cosh(T)
        B = phi(ctx, T, Precision.EXTENDED)
        hardy = ctx.hardy_extended()
        c1 = (mpmath.mpf(n - 1) / n) ** (n - 1)
        c3 = (mpmath.mpf(n - 1) / n) ** (n - 2)
        F = sh ** (n * (n - 1)) - B ** (n - 1) - hardy * B**n
        if n >= 3:
            G = (
                sh ** (n * (n - 2)) * ch
                - B ** (n - 2)
                - c1 * B ** (n - 1)
            )
            H = (
                sh ** ((n - 1) * (n - 2))
                + mpmath.mpf(n * (n - 2)) / (n - 1) ** 2 * (sh ** (n * (n - 3)) - B ** (n - 3))
                - c3 * B ** (n - 2)
            )
        else:
            G = H = None
        # each scale is the larger of the two sides that cancel
        scales = (
            max(F + hardy * B**n, hardy * B**n),
            None if G is None else max(G + c1 * B ** (n - 1), c1 * B ** (n - 1)),
            None if H is None else max(H + c3 * B ** (n - 2), c3 * B ** (n - 2)),
        )
        return F, G, H, scales


def _lemma_F_double(ctx: DimensionContext, t: float) -> Tuple[float, float]:
    n = ctx.n
    a = sinh_pow(t, n)
    b = phi(ctx, t)
    d = sinh_n_minus_phi(ctx, t)
    leading = _power_difference(d, a, b, n - 1)
    tail = ctx.hardy * b**n
    return leading - tail, max(leading, tail)


def _lemma_G_double(ctx: DimensionContext, t: float) -> Tuple[float, float]:
    n = ctx.n
    a = sinh_pow(t, n)
    b = phi(ctx, t)
    d = sinh_n_minus_phi(ctx, t)
    cosh_minus_one = 2.0 * math.sinh(0.5 * t) ** 2
    positive = a ** (n - 2) * cosh_minus_one + _power_difference(d, a, b, n - 2)
    tail = ((n - 1) / n) ** (n - 1) * b ** (n - 1)
    return positive - tail, max(positive, tail)


def _lemma_H_double(ctx: DimensionContext, t: float) -> Tuple[float, float]:
    n = ctx.n
    a = sinh_pow(t, n)
    b = phi(ctx, t)
    d = sinh_n_minus_phi(ctx, t)
    head = sinh_pow(t, (n - 1) * (n - 2))
    middle = n * (n - 2) / (n - 1) ** 2 * _power_difference(d, a, b, n - 3)
    tail = ((n - 1) / n) ** (n - 2) * b ** (n - 2)
    return head + middle - tail, max(head + middle, tail)


def _needs_extended(ctx: DimensionContext, value: float, scale: float, t: float) -> bool:
    if not (math.isfinite(value) and math.isfinite(scale)):
        return True
    if t > SWEEP_CONFIG["extended_from_t"]:
        return True
    # n = 2 is the equality case: cancellation is the expected outcome
    return ctx.n >= 3 and scale > 0.0 and abs(value) < CANCELLATION_THRESHOLD * scale


def _evaluate(ctx, t, precision, double_fn, index) -> Tuple[Real, Real, bool]:
    if t < 0.0:
        raise DomainError(f"Lemma functions need t >= 0, got {t}")
    if t == 0.0:
        return 0.0, 0.0, False
    mode = None if precision is None else Precision.parse(precision)
    if mode is not Precision.EXTENDED:
        try:
            value, scale = double_fn(ctx, t)
        except OverflowError:
            value, scale = math.inf, math.inf
        if mode is Precision.DOUBLE or not _needs_extended(ctx, value, scale, t):
            return value, scale, False
    values = _lemma_values_extended(ctx, t)
    return values[index], values[3][index], True


def _require_upper_branch(ctx: DimensionContext, name: str) -> None:
    if ctx.n < 3:
        raise DomainError(f"{name} is defined for n >= 3 only, got n={ctx.n}")


def lemma_F(ctx: DimensionContext, t: float, precision: Optional[Precision] = None) -> Real:
    """F(t) = sinh^(n(n-1)) t - Phi^(n-1) - ((n-1)/n)^n Phi^n

    precision=None picks extended precision automatically when the double
    result overflows or the leading terms cancel.
    """
    return _evaluate(ctx, t, precision, _lemma_F_double, 0)[0]


def lemma_G(ctx: DimensionContext, t: float, precision: Optional[Precision] = None) -> Real:
    _require_upper_branch(ctx, "G")
    return _evaluate(ctx, t, precision, _lemma_G_double, 1)[0]


def lemma_H(ctx: DimensionContext, t: float, precision: Optional[Precision] = None) -> Real:
    _require_upper_branch(ctx, "H")
    return _evaluate(ctx, t, precision, _lemma_H_double, 2)[0]


def small_t_ratio(ctx: DimensionContext, t: float) -> float:
    """F(t) / Phi(t)^n in extended precision, exposing the behaviour near 0"""
    F, _, _, _ = _lemma_values_extended(ctx, t)
    with extended_context(_extra_digits(t)):
        return float(F / phi(ctx, mpmath.mpf(t), Precision.EXTENDED) ** ctx.n)


def _sweep_point(ctx: DimensionContext, t: float, precision: Optional[Precision]) -> Dict[str, Any]:
    F, scale_F, extended = _evaluate(ctx, t, precision, _lemma_F_double, 0)
    record = {
        "t": float(t),
        "F_rel": float(F / scale_F) if scale_F else 0.0,
        "extended": extended,
        "F_fail": bool(F < -LEMMA_TOLERANCE * scale_F),
    }
    if ctx.n == 2:
        with extended_context(10):
            sinh_sq = mpmath.sinh(mpmath.mpf(t)) ** 2 if extended else math.sinh(t) ** 2
            record["deviation"] = float(abs(F) / max(1, sinh_sq))
        return record
    G, scale_G, _ = _evaluate(ctx, t, precision, _lemma_G_double, 1)
    H, scale_H, _ = _evaluate(ctx, t, precision, _lemma_H_double, 2)
    record["G_rel"] = float(G / scale_G) if scale_G else 0.0
    record["H_rel"] = float(H / scale_H) if scale_H else 0.0
    record["G_fail"] = bool(G <= -LEMMA_TOLERANCE * scale_G)
    record["H_fail"] = bool(H <= -LEMMA_TOLERANCE * scale_H)
    return record


def sweep_lemma(
    ctx: DimensionContext, grid: LemmaGrid, precision: Optional[Precision] = None
) -> LemmaSweepReport:
    """Minimum slacks of F, G, H over a grid, relative to the larger cancelling side

    precision=None evaluates in double and falls back to extended where double
    overflows or cancels; EXTENDED forces mpmath everywhere.

    Runs sequentially: mpmath keeps its working precision in process-global state.
    """
    ts = grid.points()

    def evaluate(t: float) -> Dict[str, Any]:
        try:
            return _sweep_point(ctx, float(t), precision)
        except HyperMTError as e:
            logger.error(f"Lemma evaluation failed at n={ctx.n}, t={t}: {e}")
            raise

    records = [evaluate(t) for t in ts]

    worst = min(records, key=lambda r: r["F_rel"])
    failures = [
        {"t": r["t"], "function": name}
        for r in records
        for name in ("F", "G", "H")
        if r.get(f"{name}_fail")
    ]
    report = LemmaSweepReport(
        n=ctx.n,
        grid=grid,
        min_slack_F=worst["F_rel"],
        argmin_F=worst["t"],
        min_slack_G=min(r["G_rel"] for r in records) if ctx.n >= 3 else None,
        min_slack_H=min(r["H_rel"] for r in records) if ctx.n >= 3 else None,
        equality_deviation=max(r["deviation"] for r in records) if ctx.n == 2 else None,
        small_t_ratio=small_t_ratio(ctx, float(ts[0])),
        failures=failures,
        extended_points=sum(1 for r in records if r["extended"]),
    )
    logger.info(
        f"Lemma sweep n={ctx.n}: min F slack {report.min_slack_F:.3e} at t={report.argmin_F:.4g}, "
        f"{len(failures)} failures, {report.extended_points} extended points"
    )
    return report


def _central_difference(fn, t: float, h: float):
    with extended_context(_extra_digits(t) + 20):
        T = mpmath.mpf(t)
        H = mpmath.mpf(h)
        return (fn(T + H) - fn(T - H)) / (2 * H)


def check_derivative_chain(
    ctx: DimensionContext, ts: Sequence[float], step: Optional[float] = None, tolerance: float = 1e-6
) -> List[InequalityCheckResult]:
    """Central differences of F and G against n(n-1) sinh^(n-1) G and (n-1)^2 sinh^(n-1) H"""
    _require_upper_branch(ctx, "The derivative chain")
    n = ctx.n
    h = NUMERICS_CONFIG["fd_step"] if step is None else step

    def F_ext(T):
        return _lemma_values_extended(ctx, T)[0]

    def G_ext(T):
        return _lemma_values_extended(ctx, T)[1]

    results = []
    for t in ts:
        F_prime = _central_difference(F_ext, t, h)
        G_prime = _central_difference(G_ext, t, h)
        _, G, H, _ = _lemma_values_extended(ctx, t)
        with extended_context(_extra_digits(t)):
            sh = mpmath.sinh(mpmath.mpf(t)) ** (n - 1)
            F_claim = n * (n - 1) * sh * G
            G_claim = (n - 1) ** 2 * sh * H
            pairs = (("F'", F_prime, F_claim), ("G'", G_prime, G_claim))
            for name, numeric, claim in pairs:
                relative = abs(numeric - claim) / abs(claim)
                results.append(
                    InequalityCheckResult(
                        name=f"derivative {name}",
                        lhs=float(numeric),
                        rhs=float(claim),
                        slack=-float(relative),
                        tolerance=tolerance,
                        passed=bool(relative <= tolerance),
                        context={"n": n, "t": float(t), "step": h},
                    )
                )
    return results


def check_phi_bounds(ctx: DimensionContext, ts: Sequence[float]) -> List[InequalityCheckResult]:
    """Phi(t) < sinh^n t and Phi(t) < n/(n-1) sinh^(n-1) t, up to rounding in Phi

    The second gap is relatively O(t e^-2t), below double resolution for large t.
    """
    results = []
    for t in ts:
        value = phi(ctx, t)
        first, second = phi_upper_bounds(ctx, t)
        for name, bound in (("sinh^n", first), ("n/(n-1) sinh^(n-1)", second)):
            results.append(
                InequalityCheckResult.build(
                    f"phi bound {name}",
                    bound,
                    value,
                    tolerance=1e-13 * value,
                    context={"n": ctx.n, "t": float(t)},
                )
            )
    return results


def _comparison_tolerance(lhs: float) -> float:
    return SWEEP_CONFIG["comparison_tolerance"] * (1.0 + abs(lhs))


def check_comparison(
    ctx: DimensionContext,
    v: RadialProfile,
    strong: bool,
    context: Optional[Dict[str, Any]] = None,
) -> InequalityCheckResult:
    """||grad_g u_g||^n - hardy ||u||^n >= ||grad u_e||^n (+ extra term when strong)"""
    hyperbolic = hyperbolic_energy(ctx, v)
    lhs = hyperbolic - ctx.hardy * ln_norm(v, ctx.n)
    rhs = euclidean_energy(ctx, v)
    if strong:
        rhs += extra_term(ctx, v)
    record = {"n": ctx.n, "strong": bool(strong), "knots": int(v.knots.size)}
    record.update(context or {})
    return InequalityCheckResult.build(
        "comparison (strong)" if strong else "comparison",
        lhs,
        rhs,
        _comparison_tolerance(lhs),
        record,
    )


def check_hardy(
    ctx: DimensionContext, v: RadialProfile, context: Optional[Dict[str, Any]] = None
) -> InequalityCheckResult:
    lhs = hyperbolic_energy(ctx, v)
    rhs = ctx.hardy * ln_norm(v, ctx.n)
    record = {"n": ctx.n}
    record.update(context or {})
    return InequalityCheckResult.build("hardy", lhs, rhs, _comparison_tolerance(lhs), record)


def check_constraint_norm(ctx: DimensionContext, v: RadialProfile, lam: float) -> float:
    """||grad_g u||^n - lambda ||u||^n"""
    if lam < 0.0 or lam > ctx.hardy:
        raise DomainError(f"lambda must lie in [0, {ctx.hardy}], got {lam}")
    return hyperbolic_energy(ctx, v) - lam * ln_norm(v, ctx.n)


def normalize_to_constraint(ctx: DimensionContext, v: RadialProfile, lam: float) -> RadialProfile:
    """Scale v so that the constrained energy equals 1 (homogeneity of degree n)"""
    value = check_constraint_norm(ctx, v, lam)
    if value <= 0.0:
        raise DomainError("Cannot normalize a profile with non-positive constrained energy")
    return v.scaled(value ** (-1.0 / ctx.n))


def reduction_check(
    ctx: DimensionContext, v: RadialProfile, lam: float
) -> InequalityCheckResult:
    """||grad_g u||^n - lambda ||u||^n >= ||grad u_e||^n + tau_lambda ||u_e||^n"""
    tau = tau_lambda(ctx, lam)
    norm = ln_norm(v, ctx.n)
    lhs = hyperbolic_energy(ctx, v) - lam * norm
    rhs = euclidean_energy(ctx, v) + tau * norm
    return InequalityCheckResult.build(
        "lambda reduction", lhs, rhs, _comparison_tolerance(lhs), {"n": ctx.n, "lambda": lam}
    )


def elementary_inequality(a: float, b: float, n: int) -> InequalityCheckResult:
    """|a - b|^n >= |a|^n + |b|^n - n a b^(n-1) for a <= b, b >= 0"""
    if a > b or b < 0.0:
        raise DomainError(f"Need a <= b and b >= 0, got a={a}, b={b}")
    lhs = abs(a - b) ** n
    rhs = abs(a) ** n + abs(b) ** n - n * a * b ** (n - 1)
    scale = (abs(a) + abs(b)) ** n
    return InequalityCheckResult.build(
        "elementary", lhs, rhs, 1e-12 * max(scale, 1e-300), {"n": n, "a": a, "b": b}
    )


@dataclass(frozen=True)
class CorpusEntry:
    profile_id: int
    seed: int
    profile: RadialProfile


def random_corpus(seed: int, count: int, max_value: Optional[float] = None) -> List[CorpusEntry]:
    """Seeded profiles: 2-50 knots, log-uniform support in [1e-3, 1e3]"""
    rng = np.random.default_rng(seed)
    knots = PROPERTY_PATTERNS["knots"]
    support = PROPERTY_PATTERNS["support"]
    values = PROPERTY_PATTERNS["max_value"]
    corpus = []
    for i in range(count):
        n_knots = int(rng.integers(knots["min"], knots["max"] + 1))
        log_support = rng.uniform(math.log(support["min"]), math.log(support["max"]))
        height = max_value if max_value is not None else rng.uniform(values["min"], values["max"])
        height = max(float(height), 1e-3)
        profile_seed = int(rng.integers(0, 2**32))
        profile = random_profile(profile_seed, n_knots, math.exp(log_support), height)
        corpus.append(CorpusEntry(profile_id=i, seed=profile_seed, profile=profile))
    return corpus
