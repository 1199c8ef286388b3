"""Domain types and the probability-distribution algebra shared by all models.

Everything here is an immutable value and every operation is a pure function,
so the whole module is safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Tolerance for analytic probability identities: comfortably above double
# rounding noise, far below anything the formulas can produce.
PROB_TOL = 1e-12

_TWO_PI = 2.0 * math.pi


def canonical_radians(value: float) -> float:
    """Map an angle into [-pi, pi) without changing its sine or cosine."""
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {value!r}")
    folded = math.remainder(value, _TWO_PI)  # exact IEEE remainder, lands in [-pi, pi]
    if folded >= math.pi:
        folded -= _TWO_PI
    return folded


@dataclass(frozen=True)
class Angle:
    """Plane angle stored in radians, canonicalized to [-pi, pi) on construction."""

    radians: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radians", canonical_radians(float(self.radians)))

    @classmethod
    def from_degrees(cls, degrees: float) -> Angle:
        return cls(math.radians(degrees))

    @property
    def degrees(self) -> float:
        return math.degrees(self.radians)


class PhotonCharge(Enum):
    """Hidden two-valued charge carried by each emitted pair."""

    POSITIVE = "positive"
    NEGATIVE = "negative"


class Outcome(Enum):
    """Result of a single pass/no-pass test at one analyzer."""

    YES = "yes"
    NO = "no"


@dataclass(frozen=True)
class PolarizerSettings:
    """Optical-axis angles of the two analyzers.

    The relative angle is always derived via relative_angle(); it is never
    stored separately.
    """

    theta_a: Angle
    theta_b: Angle

    @classmethod
    def from_degrees(cls, theta_a: float, theta_b: float) -> PolarizerSettings:
        return cls(Angle.from_degrees(theta_a), Angle.from_degrees(theta_b))


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the four joint outcomes (Yes,Yes), (Yes,No), (No,Yes), (No,No)."""

    p_yy: float
    p_yn: float
    p_ny: float
    p_nn: float

    def __post_init__(self) -> None:
        for name in ("p_yy", "p_yn", "p_ny", "p_nn"):
            p = float(getattr(self, name))
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p!r} is outside [0, 1]")
            object.__setattr__(self, name, p)
        total = self.p_yy + self.p_yn + self.p_ny + self.p_nn
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"outcome probabilities sum to {total!r}, expected 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_yy, self.p_yn, self.p_ny, self.p_nn)


@dataclass(frozen=True)
class WeightedDistribution:
    """A conditional outcome distribution together with the weight of its branch.

    Keeping the weight explicit (instead of pre-multiplying the entries) makes
    the equal-frequency premise of the charge source a visible, testable number.
    """

    weight: float
    dist: JointDistribution

    def __post_init__(self) -> None:
        w = float(self.weight)
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"weight={w!r} is outside [0, 1]")
        object.__setattr__(self, "weight", w)

    def weighted_tuple(self) -> tuple[float, float, float, float]:
        """Entries multiplied by the branch weight."""
        return tuple(self.weight * p for p in self.dist.as_tuple())


@dataclass(frozen=True)
class Marginals:
    """Single-side pass probabilities derived from a joint distribution."""

    p_a_yes: float
    p_b_yes: float


def relative_angle(settings: PolarizerSettings) -> Angle:
    """Canonicalized difference theta_a - theta_b between the two optical axes."""
    return Angle(settings.theta_a.radians - settings.theta_b.radians)


def marginals(dist: JointDistribution) -> Marginals:
    """Row/column sums of a joint distribution."""
    _check_normalized(dist)
    return Marginals(p_a_yes=dist.p_yy + dist.p_yn, p_b_yes=dist.p_yy + dist.p_ny)


def sum_distributions(
    first: WeightedDistribution, second: WeightedDistribution
) -> JointDistribution:
    """Mixture of two weighted branches; the weights must sum to 1."""
    total_weight = first.weight + second.weight
    if abs(total_weight - 1.0) > PROB_TOL:
        raise ValueError(f"branch weights sum to {total_weight!r}, expected 1")
    wa, wb = first.weight, second.weight
    a, b = first.dist, second.dist
    return JointDistribution(
        p_yy=wa * a.p_yy + wb * b.p_yy,
        p_yn=wa * a.p_yn + wb * b.p_yn,
        p_ny=wa * a.p_ny + wb * b.p_ny,
        p_nn=wa * a.p_nn + wb * b.p_nn,
    )


def _check_normalized(dist: JointDistribution) -> None:
    # The constructor already enforces this; re-checked where a corrupted value
    # would otherwise propagate silently into downstream statistics.
    total = dist.p_yy + dist.p_yn + dist.p_ny + dist.p_nn
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"corrupted distribution: probabilities sum to {total!r}")
