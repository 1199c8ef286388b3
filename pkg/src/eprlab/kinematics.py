"""Relativistic and anisotropic-geometry primitives behind the experiment models:
the velocity-angle law, length contraction, and direction-dependent vector norms.

The speed of light is normalized to 1 throughout; velocities are dimensionless
fractions of c. All types are immutable values and all operations pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Angle

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Velocity:
    """Box speed as a fraction of c. beta = 1 is the accepted limiting case."""

    beta: float

    def __post_init__(self) -> None:
        b = float(self.beta)
        if not 0.0 <= b <= 1.0:
            raise ValueError(f"beta={b!r} must lie in [0, 1]")
        object.__setattr__(self, "beta", b)


@dataclass(frozen=True)
class Aperture:
    """Tube opening along y: current width dy against the maximal width dy_max."""

    dy: float
    dy_max: float

    def __post_init__(self) -> None:
        if not self.dy_max > 0.0:
            raise ValueError(f"dy_max={self.dy_max!r} must be positive")
        if not 0.0 <= self.dy <= self.dy_max:
            raise ValueError(f"dy={self.dy!r} must lie in [0, dy_max]")

    def pass_fraction(self) -> float:
        """Pass probability of a positively charged ball: (dy / dy_max)^2."""
        ratio = self.dy / self.dy_max
        return ratio * ratio


@dataclass(frozen=True)
class PreferredDirection:
    """Unit 3-vector singling out one observer's spatial axis."""

    nu: tuple[float, float, float]

    def __post_init__(self) -> None:
        nu = tuple(float(c) for c in self.nu)
        if len(nu) != 3:
            raise ValueError("a direction needs exactly three components")
        norm = math.sqrt(nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2])
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"direction norm {norm!r} is not 1")
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_angle(cls, angle: Angle) -> PreferredDirection:
        """Unit direction at the given angle in the x-y polarization plane."""
        return cls((math.cos(angle.radians), math.sin(angle.radians), 0.0))

    def dot(self, other: PreferredDirection) -> float:
        a, b = self.nu, other.nu
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@dataclass(frozen=True)
class FieldVector:
    """Electric-field 3-vector; only its direction enters any probability."""

    e: tuple[float, float, float]

    def __post_init__(self) -> None:
        e = tuple(float(c) for c in self.e)
        if len(e) != 3:
            raise ValueError("a field vector needs exactly three components")
        object.__setattr__(self, "e", e)

    @classmethod
    def along(cls, direction: PreferredDirection, magnitude: float = 1.0) -> FieldVector:
        nx, ny, nz = direction.nu
        return cls((magnitude * nx, magnitude * ny, magnitude * nz))

    @property
    def magnitude(self) -> float:
        ex, ey, ez = self.e
        return math.sqrt(ex * ex + ey * ey + ez * ez)

    def component_along(self, direction: PreferredDirection) -> float:
        ex, ey, ez = self.e
        nx, ny, nz = direction.nu
        return ex * nx + ey * ny + ez * nz


@dataclass(frozen=True)
class FourVector:
    """Four-vector under the Minkowski product with signature (+, -, -, -)."""

    t: float
    x: float
    y: float
    z: float

    @classmethod
    def null_from_direction(cls, direction: PreferredDirection) -> FourVector:
        """The null vector (1, nu) attached to a unit spatial direction."""
        nx, ny, nz = direction.nu
        return cls(1.0, nx, ny, nz)

    def minkowski_dot(self, other: FourVector) -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z


@dataclass(frozen=True)
class AnisotropyParameter:
    """Exponent setting how strongly vector length depends on orientation; |r| < 1."""

    r: float

    def __post_init__(self) -> None:
        r = float(self.r)
        if not abs(r) < 1.0:
            raise ValueError(f"anisotropy exponent must satisfy |r| < 1, got {r!r}")
        object.__setattr__(self, "r", r)


def angle_to_velocity(theta: Angle) -> Velocity:
    """Relative box speed implied by the relative index angle: beta = |sin theta|."""
    return Velocity(abs(math.sin(theta.radians)))


def lorentz_contract(dy_proper: float, velocity: Velocity) -> float:
    """Length of a rod moving at the given speed: dy_proper * sqrt(1 - beta^2).

    Speeds above 1 are rejected at Velocity construction.
    """
    beta = velocity.beta
    return dy_proper * math.sqrt(1.0 - beta * beta)


def observed_aperture(dy_max: float, theta: Angle) -> float:
    """Cross-box aperture seen at relative index angle theta: dy_max * |cos theta|.

    Agrees with lorentz_contract(dy_max, angle_to_velocity(theta)) to within
    1e-12 for all theta: the contraction factor sqrt(1 - sin^2) is |cos|.
    """
    if not dy_max > 0.0:
        raise ValueError(f"dy_max={dy_max!r} must be positive")
    return dy_max * abs(math.cos(theta.radians))


def bogoslovsky_norm_4(x: FourVector, nu: FourVector, r: AnisotropyParameter) -> float:
    """Anisotropic Minkowski length ((nu.x)^2 / (x.x))^(r/2) * sqrt(x.x).

    Requires x timelike and nu null; the orientation factor makes the length
    depend on the angle between x and the preferred direction.
    """
    xx = x.minkowski_dot(x)
    if xx <= 0.0:
        raise ValueError(f"norm needs a timelike vector, got x.x = {xx!r}")
    scale = nu.t * nu.t + nu.x * nu.x + nu.y * nu.y + nu.z * nu.z
    nn = nu.minkowski_dot(nu)
    if abs(nn) > UNIT_TOL * max(1.0, scale):
        raise ValueError(f"preferred four-vector must be null, got nu.nu = {nn!r}")
    nx = nu.minkowski_dot(x)
    ratio = nx * nx / xx
    if ratio == 0.0 and r.r < 0.0:
        raise ValueError("nu.x = 0 with r < 0 makes the orientation factor blow up")
    return ratio ** (r.r / 2.0) * math.sqrt(xx)


def bogoslovsky_norm_3(e: FieldVector, nu: PreferredDirection, r: AnisotropyParameter) -> float:
    """Anisotropic Euclidean length (|nu.e| / |e|)^r * |e|.

    The absolute value keeps the norm real for anti-aligned fields; downstream
    probabilities use only even powers, so no sign information is lost.
    """
    mag = e.magnitude
    if mag == 0.0:
        raise ValueError("cannot take the norm of a zero field vector")
    ratio = abs(e.component_along(nu)) / mag
    if ratio == 0.0 and r.r < 0.0:
        raise ValueError("nu.e = 0 with r < 0 makes the orientation factor blow up")
    return ratio**r.r * mag
