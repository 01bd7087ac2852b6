"""Per-nutrient utility curve: deficit rise, plateau, excess decline.

``utility`` maps an intake to the fraction of physiological need covered
(1.0 means fully covered). With allowance ``rda``, upper level ``ul``,
decay scale ``s`` and exponents ``p`` and ``q``:

* intake below ``rda``:   ``1 - (1 - x / rda) ** p``  (rising, concave)
* ``rda`` to ``ul``:      exactly ``1``               (flat plateau)
* intake above ``ul``:    ``1 - ((x - ul) / s) ** q`` (falling, concave),
  floored at 0 under the default clamp policy.

Nutrients without a usable upper level stay at 1 for any intake at or
above the allowance. Intakes are expressed in the profile's own unit.
All functions are pure and safe to evaluate concurrently.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .nutrients import ResolvedProfile


class Segment(Enum):
    """Position of an intake relative to the two thresholds."""

    DEFICIT = "deficit"
    PLATEAU = "plateau"
    EXCESS = "excess"


class ClampPolicy(Enum):
    CLAMP_AT_ZERO = "zero"
    UNBOUNDED = "none"


@dataclass(frozen=True)
class UtilityParams:
    """Shape choices for the parts of the curve the thresholds leave open.

    ``decay_scale`` is interpreted in the evaluated profile's unit; when
    ``None`` it defaults to that profile's plateau width, so the decline
    above the upper level scales with the nutrient's own tolerance band.
    """

    deficit_exponent: float = 2.0
    excess_exponent: float = 2.0
    decay_scale: float | None = None
    clamp_floor: ClampPolicy = ClampPolicy.CLAMP_AT_ZERO

    def __post_init__(self):
        if not self.deficit_exponent > 1.0:
            raise ValueError("deficit_exponent must be > 1")
        if not self.excess_exponent > 1.0:
            raise ValueError("excess_exponent must be > 1")
        if self.decay_scale is not None and not self.decay_scale > 0.0:
            raise ValueError("decay_scale must be > 0")

    def decay_scale_for(self, profile: ResolvedProfile) -> float:
        if self.decay_scale is not None:
            return self.decay_scale
        return profile.plateau_width


class CurvePoint(NamedTuple):
    intake: float
    utility: float
    marginal: float


def _check_profile(profile: ResolvedProfile) -> None:
    if profile.ul is not None and profile.ul < profile.rda:
        raise ValueError(
            f"{profile.id}: upper level {profile.ul:g} below allowance "
            f"{profile.rda:g}; resolve the profile without trust_ul"
        )


def _check_intake(intake: float) -> None:
    if intake < 0:
        raise ValueError(f"intake must be nonnegative, got {intake!r}")


def segment_of(profile: ResolvedProfile, intake: float) -> Segment:
    """Classify an intake. Both thresholds are inclusive plateau ends."""
    _check_profile(profile)
    _check_intake(intake)
    if intake < profile.rda:
        return Segment.DEFICIT
    if profile.ul is None or intake <= profile.ul:
        return Segment.PLATEAU
    return Segment.EXCESS


def piecewise_utility(
    intakes,
    rda: float,
    ul: float | None,
    decay_scale: float,
    deficit_exponent: float,
    excess_exponent: float,
    clamp: bool,
):
    """Vectorized utility kernel over raw threshold values.

    ``intakes`` may be a scalar or an ndarray; thresholds, intakes and
    ``decay_scale`` must share one unit. Used by both the scalar API and
    the grid evaluators so every caller applies identical arithmetic.
    """
    x = np.asarray(intakes, dtype=float)
    if np.any(x < 0):
        raise ValueError("intakes must be nonnegative")
    u = np.ones_like(x)
    low = x < rda
    u[low] = 1.0 - (1.0 - x[low] / rda) ** deficit_exponent
    if ul is not None:
        high = x > ul
        if np.any(high):
            drop = 1.0 - ((x[high] - ul) / decay_scale) ** excess_exponent
            if clamp:
                drop = np.maximum(drop, 0.0)
            u[high] = drop
    return u


def utility(profile: ResolvedProfile, params: UtilityParams, intake: float) -> float:
    """Fraction of need covered by ``intake`` (profile units). Capped at 1."""
    _check_profile(profile)
    value = piecewise_utility(
        intake,
        profile.rda,
        profile.ul,
        params.decay_scale_for(profile),
        params.deficit_exponent,
        params.excess_exponent,
        params.clamp_floor is ClampPolicy.CLAMP_AT_ZERO,
    )
    return float(value)


def utility_values(
    profile: ResolvedProfile, params: UtilityParams, intakes
) -> np.ndarray:
    """Vectorized ``utility`` over an array of intakes in profile units."""
    _check_profile(profile)
    return piecewise_utility(
        intakes,
        profile.rda,
        profile.ul,
        params.decay_scale_for(profile),
        params.deficit_exponent,
        params.excess_exponent,
        params.clamp_floor is ClampPolicy.CLAMP_AT_ZERO,
    )


def _breakpoints(profile: ResolvedProfile, params: UtilityParams) -> list[float]:
    """Intakes where the curve switches branch (kinks of the derivative)."""
    points = [profile.rda]
    if profile.ul is not None:
        points.append(profile.ul)
        if params.clamp_floor is ClampPolicy.CLAMP_AT_ZERO:
            points.append(profile.ul + params.decay_scale_for(profile))
    return points


def _open_rate(profile: ResolvedProfile, params: UtilityParams, intake: float, side: int) -> float:
    """Derivative of the branch governing ``intake``.

    ``side`` breaks ties at branch boundaries: -1 picks the branch just
    below the point, +1 the branch at/above it.
    """
    rda, ul = profile.rda, profile.ul
    p = params.deficit_exponent
    q = params.excess_exponent
    below = intake < rda or (intake == rda and side < 0)
    if below:
        return (p / rda) * (1.0 - intake / rda) ** (p - 1.0)
    if ul is None or intake < ul or (intake == ul and side <= 0):
        return 0.0
    scale = params.decay_scale_for(profile)
    if params.clamp_floor is ClampPolicy.CLAMP_AT_ZERO:
        floor_x = ul + scale
        if intake > floor_x or (intake == floor_x and side > 0):
            return 0.0
    return -(q / scale) * ((intake - ul) / scale) ** (q - 1.0)


def marginal_utility(
    profile: ResolvedProfile, params: UtilityParams, intake: float
) -> float | tuple[float, float]:
    """Analytic derivative of ``utility`` in fraction per profile unit.

    Positive below the allowance, zero on the plateau (and anywhere at or
    above the allowance for nutrients without an upper level), negative
    above the upper level until the clamp floor engages. At an exact
    branch boundary (allowance, upper level, or the clamp crossing) the
    derivative jumps, so a two-sided ``(left, right)`` pair is returned
    instead of a scalar.
    """
    _check_profile(profile)
    _check_intake(intake)
    if intake in _breakpoints(profile, params):
        return (
            _open_rate(profile, params, intake, side=-1),
            _open_rate(profile, params, intake, side=+1),
        )
    return _open_rate(profile, params, intake, side=0)


def curve_sample(
    profile: ResolvedProfile,
    params: UtilityParams,
    x_max: float,
    n: int,
) -> list[CurvePoint]:
    """Sample the curve on ``[0, x_max]`` with ``n`` even points.

    The allowance and the upper level are inserted as extra points when
    they fall inside the range (even if they coincide with an even
    sample). At an exact boundary the forward (right-sided) rate is
    reported as the marginal value.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not x_max > 0:
        raise ValueError("x_max must be positive")
    xs = list(np.linspace(0.0, x_max, n))
    for bp in (profile.rda, profile.ul):
        if bp is not None and 0.0 <= bp <= x_max:
            xs.append(float(bp))
    xs.sort()
    points = []
    for x in xs:
        m = marginal_utility(profile, params, x)
        if isinstance(m, tuple):
            m = m[1]
        points.append(CurvePoint(x, utility(profile, params, x), m))
    return points


def finite_difference_rate(
    profile: ResolvedProfile,
    params: UtilityParams,
    intake: float,
    h: float,
) -> float:
    """Central finite difference of ``utility``; test oracle for the
    analytic derivative (not used by production paths)."""
    lo = max(intake - h, 0.0)
    hi = intake + h
    return (
        utility(profile, params, hi) - utility(profile, params, lo)
    ) / (hi - lo)
