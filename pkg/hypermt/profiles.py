"""Non-increasing rearrangement profiles and their radial realizations.

A RadialProfile is v = u* on the measure half-line, piecewise linear between
knots and zero past the last knot. Transport to the hyperbolic or Euclidean
radius maps knots only; values between mapped knots are linear in the new
coordinate.
"""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from .errors import DomainError
from .geometry import DimensionContext, phi, phi_inv

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def _validate_piecewise(coords: np.ndarray, values: np.ndarray, label: str) -> None:
    if coords.ndim != 1 or values.ndim != 1 or coords.size != values.size:
        raise DomainError(f"{label}: coordinates and values must be 1-D of equal length")
    if coords.size == 0:
        raise DomainError(f"{label}: at least one knot is required")
    if not (np.all(np.isfinite(coords)) and np.all(np.isfinite(values))):
        raise DomainError(f"{label}: knots and values must be finite")
    if coords[0] != 0.0:
        raise DomainError(f"{label}: first knot must be 0, got {coords[0]}")
    if np.any(np.diff(coords) <= 0.0):
        raise DomainError(f"{label}: knots must be strictly increasing")
    if np.any(values < 0.0):
        raise DomainError(f"{label}: values must be non-negative")
    if np.any(np.diff(values) > 0.0):
        raise DomainError(f"{label}: values must be non-increasing")
    if values[-1] != 0.0:
        raise DomainError(f"{label}: last value must be exactly 0 (compact support)")


class _PiecewiseLinear:
    """Shared evaluation for the three piecewise-linear representations"""

    _coords: np.ndarray
    values: np.ndarray

    def __call__(self, x: ArrayLike) -> ArrayLike:
        result = np.interp(x, self._coords, self.values, right=0.0)
        return float(result) if np.ndim(result) == 0 else result

    @property
    def segment_count(self) -> int:
        return self._coords.size - 1

    @property
    def is_zero(self) -> bool:
        return bool(self.values[0] == 0.0)

    @property
    def sup_value(self) -> float:
        return float(self.values[0])

    def slopes(self) -> np.ndarray:
        if self._coords.size < 2:
            return np.zeros(0)
        return np.diff(self.values) / np.diff(self._coords)


@dataclass(frozen=True, eq=False)
class RadialProfile(_PiecewiseLinear):
    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "knots", _frozen(self.knots))
        object.__setattr__(self, "values", _frozen(self.values))
        _validate_piecewise(self.knots, self.values, "RadialProfile")

    @property
    def _coords(self) -> np.ndarray:
        return self.knots

    @property
    def support(self) -> float:
        return float(self.knots[-1])

    @classmethod
    def zero(cls, support: float = 1.0) -> "RadialProfile":
        return cls(knots=[0.0, support], values=[0.0, 0.0])

    def scaled(self, factor: float) -> "RadialProfile":
        """|factor| * v; profiles are magnitudes, so the sign is dropped"""
        return RadialProfile(self.knots, abs(factor) * self.values)

    def segments(self):
        """(s_left, s_right, v_left, v_right) per segment, in index order"""
        return zip(self.knots[:-1], self.knots[1:], self.values[:-1], self.values[1:])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RadialProfile):
            return NotImplemented
        return np.array_equal(self.knots, other.knots) and np.array_equal(
            self.values, other.values
        )


@dataclass(frozen=True, eq=False)
class HyperbolicRadialFunction(_PiecewiseLinear):
    radius_knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "radius_knots", _frozen(self.radius_knots))
        object.__setattr__(self, "values", _frozen(self.values))
        _validate_piecewise(self.radius_knots, self.values, "HyperbolicRadialFunction")

    @property
    def _coords(self) -> np.ndarray:
        return self.radius_knots


@dataclass(frozen=True, eq=False)
class EuclideanRadialFunction(_PiecewiseLinear):
    radius_knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "radius_knots", _frozen(self.radius_knots))
        object.__setattr__(self, "values", _frozen(self.values))
        _validate_piecewise(self.radius_knots, self.values, "EuclideanRadialFunction")

    @property
    def _coords(self) -> np.ndarray:
        return self.radius_knots


def profile_from_hyperbolic(
    ctx: DimensionContext, u: HyperbolicRadialFunction
) -> RadialProfile:
    """v(s) = u(Phi^-1(s / sigma_n)), re-linearized at the mapped knots"""
    knots = [ctx.sigma * phi(ctx, t) for t in u.radius_knots]
    return RadialProfile(knots, u.values)


def hyperbolic_realization(ctx: DimensionContext, v: RadialProfile) -> HyperbolicRadialFunction:
    """u_g(t) = v(sigma_n Phi(t)), re-linearized at the mapped knots"""
    radii = [phi_inv(ctx, s / ctx.sigma) for s in v.knots]
    return HyperbolicRadialFunction(radii, v.values)


def euclidean_realization(ctx: DimensionContext, v: RadialProfile) -> EuclideanRadialFunction:
    """u_e(r) = v(sigma_n r^n), re-linearized at the mapped knots"""
    radii = (v.knots / ctx.sigma) ** (1.0 / ctx.n)
    return EuclideanRadialFunction(radii, v.values)


def profile_from_euclidean(
    ctx: DimensionContext, u: EuclideanRadialFunction
) -> RadialProfile:
    return RadialProfile(ctx.sigma * u.radius_knots**ctx.n, u.values)


def distribution_function(v: RadialProfile, level: float) -> float:
    """mu(level) = sup{s : v(s) > level}, the measure of the superlevel set"""
    if level <= 0.0:
        raise DomainError(f"Distribution function needs level > 0, got {level}")
    values = v.values
    above = np.nonzero(values > level)[0]
    if above.size == 0:
        return 0.0
    i = int(above[-1])
    # values[-1] == 0 < level, so a right neighbour exists
    v_left, v_right = values[i], values[i + 1]
    s_left, s_right = v.knots[i], v.knots[i + 1]
    return float(s_left + (v_left - level) / (v_left - v_right) * (s_right - s_left))


@dataclass(frozen=True)
class WTransform:
    """w(s) = v(s) s^(1/n) and its derivative inside segments"""

    profile: RadialProfile
    n: int

    def __call__(self, s: ArrayLike) -> ArrayLike:
        s = np.asarray(s, dtype=float)
        result = self.profile(s) * s ** (1.0 / self.n)
        return float(result) if result.ndim == 0 else result

    def slope_at(self, s: float) -> float:
        """v'(s), taking the right-hand segment at knots"""
        knots = self.profile.knots
        if s >= knots[-1]:
            return 0.0
        i = int(np.searchsorted(knots, s, side="right")) - 1
        return float(self.profile.slopes()[i])

    def derivative(self, s: float) -> float:
        if s <= 0.0:
            return math.inf if self.profile.sup_value > 0.0 else 0.0
        n = self.n
        return self.slope_at(s) * s ** (1.0 / n) + self.profile(s) * s ** (1.0 / n - 1.0) / n


def w_transform(v: RadialProfile, n: int) -> WTransform:
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}")
    return WTransform(v, int(n))


def random_profile(
    seed: int, n_knots: int, support: float, max_value: float
) -> RadialProfile:
    """Seeded profile: sorted uniform knots on (0, support), sorted uniform values"""
    if n_knots < 2:
        raise DomainError(f"n_knots must be at least 2, got {n_knots}")
    if support <= 0.0 or max_value <= 0.0:
        raise DomainError("support and max_value must be positive")
    rng = np.random.default_rng(seed)
    while True:
        interior = np.sort(rng.uniform(0.0, support, n_knots - 2))
        knots = np.concatenate(([0.0], interior, [support]))
        if np.all(np.diff(knots) > 0.0):
            break
    values = np.sort(rng.uniform(0.0, max_value, n_knots - 1))[::-1]
    return RadialProfile(knots, np.concatenate((values, [0.0])))


def profile_to_dict(v: RadialProfile, n: int) -> Dict[str, Any]:
    return {"n": int(n), "knots": v.knots.tolist(), "values": v.values.tolist()}


def profile_from_dict(data: Dict[str, Any]) -> "tuple[int, RadialProfile]":
    """Parse {"n", "knots", "values"}; returns (n, profile)"""
    for field in ("n", "knots", "values"):
        if field not in data:
            raise DomainError(f"Missing required field: {field}")
    return int(data["n"]), RadialProfile(data["knots"], data["values"])


def load_profile(path: str) -> "tuple[int, RadialProfile]":
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read profile {path}: {e}")
        raise
    return profile_from_dict(data)


def dump_profile(v: RadialProfile, n: int, path: Optional[str] = None) -> str:
    text = json.dumps(profile_to_dict(v, n), sort_keys=True)
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text
