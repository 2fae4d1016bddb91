"""3-D vector, rotation, twist, and screw algebra.

Foundational value types for rigid-body velocity analysis. A twist is the
pair (angular, linear) of a body's instantaneous velocity expressed at the
origin of a reference frame; a screw is the geometric descriptor of such a
motion (axis point, axis direction, pitch), with pure translation kept as a
distinct variant instead of an infinite-pitch sentinel.

All types are immutable and all operations are pure functions, so values can
be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Constructor gate for unit vectors: inputs within this of unit norm are
# renormalized, anything worse is rejected.
UNIT_NORM_TOL = 1e-6

# Angular magnitude below this counts as a pure translation when factoring a
# twist into a screw.
ZERO_ANGULAR_TOL = 1e-12


class Frame(Enum):
    """Motion reference of a twist: relative to the end effector or to ground."""

    EE = "end-effector"
    WORLD = "stationary"


@dataclass(frozen=True)
class Vec3:
    """3-vector with finite components (positions in m, velocities in m/s or rad/s)."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite vector component: ({self.x}, {self.y}, {self.z})")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self, zero_tol: float = 1e-12) -> "UnitVec3":
        """Scale to unit length. Raises on (near-)zero vectors."""
        n = self.norm()
        if n < zero_tol:
            raise ValueError("cannot normalize a zero vector")
        return UnitVec3(self.x / n, self.y / n, self.z / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class UnitVec3(Vec3):
    """Direction vector constrained to unit Euclidean norm (within 1e-9 once built)."""

    def __post_init__(self) -> None:
        super().__post_init__()
        n = self.norm()
        if abs(n - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"not a unit vector (norm {n:.3e})")
        # renormalize exactly so downstream algebra sees norm 1 to machine precision
        object.__setattr__(self, "x", self.x / n)
        object.__setattr__(self, "y", self.y / n)
        object.__setattr__(self, "z", self.z / n)


UNIT_X = UnitVec3(1.0, 0.0, 0.0)
UNIT_Y = UnitVec3(0.0, 1.0, 0.0)
UNIT_Z = UnitVec3(0.0, 0.0, 1.0)
ZERO = Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Twist:
    """Spatial velocity (angular rad/s, linear m/s) expressed at a frame origin.

    The frame tag records what the motion is relative to; arithmetic between
    twists with different tags is a contract violation, never silent.
    """

    angular: Vec3
    linear: Vec3
    frame: Frame

    def __add__(self, other: "Twist") -> "Twist":
        self._check_frame(other)
        return Twist(self.angular + other.angular, self.linear + other.linear, self.frame)

    def __sub__(self, other: "Twist") -> "Twist":
        self._check_frame(other)
        return Twist(self.angular - other.angular, self.linear - other.linear, self.frame)

    def __mul__(self, s: float) -> "Twist":
        return Twist(self.angular * s, self.linear * s, self.frame)

    __rmul__ = __mul__

    def _check_frame(self, other: "Twist") -> None:
        if self.frame is not other.frame:
            raise ValueError(f"mixed-frame twist arithmetic: {self.frame} vs {other.frame}")

    def with_frame(self, frame: Frame) -> "Twist":
        """Retag the frame. Only valid at an instant where the two frames'
        origins and axes coincide (e.g. composing relative and carrier motion)."""
        return Twist(self.angular, self.linear, frame)

    def norm(self) -> float:
        return math.sqrt(self.angular.dot(self.angular) + self.linear.dot(self.linear))

    def as_array(self) -> np.ndarray:
        """6-vector layout [angular | linear]."""
        return np.concatenate([self.angular.as_array(), self.linear.as_array()])

    @classmethod
    def from_array(cls, a, frame: Frame) -> "Twist":
        return cls(Vec3.from_array(a[:3]), Vec3.from_array(a[3:6]), frame)


@dataclass(frozen=True)
class Screw:
    """Rotational screw: axis through ``axis_point`` along ``axis_dir`` with
    finite pitch (m of translation per rad of rotation)."""

    axis_point: Vec3
    axis_dir: UnitVec3
    pitch: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.pitch):
            raise ValueError("screw pitch must be finite")


@dataclass(frozen=True)
class PureTranslation:
    """Degenerate screw: translation along a fixed direction, no rotation."""

    direction: UnitVec3


ScrewMotion = Screw | PureTranslation


def rodrigues_rotate(axis: UnitVec3, angle: float, v: Vec3) -> Vec3:
    """Rotate ``v`` by ``angle`` (rad) about the unit ``axis``.

    Uses the axis-angle expansion v cos a + (k x v) sin a + k (k.v)(1 - cos a);
    norm is preserved to 1e-12.
    """
    if not math.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    c = math.cos(angle)
    s = math.sin(angle)
    kxv = axis.cross(v)
    kdv = axis.dot(v)
    return v * c + kxv * s + axis * (kdv * (1.0 - c))


def point_velocity(t: Twist, p: Vec3) -> Vec3:
    """Velocity of the body point at coordinate ``p``: linear - p x angular."""
    return t.linear - p.cross(t.angular)


def twist_from_screw(s: ScrewMotion, magnitude: float, frame: Frame = Frame.EE) -> Twist:
    """Twist of a unit screw motion scaled by ``magnitude``.

    Rotational screws give (m * dir, m * (-dir x point + pitch * dir)); the
    translation variant gives (0, m * dir).
    """
    if not math.isfinite(magnitude):
        raise ValueError("screw magnitude must be finite")
    if isinstance(s, PureTranslation):
        return Twist(ZERO, s.direction * magnitude, frame)
    linear = -s.axis_dir.cross(s.axis_point) + s.axis_dir * s.pitch
    return Twist(s.axis_dir * magnitude, linear * magnitude, frame)


def screw_from_twist(t: Twist) -> ScrewMotion:
    """Factor a nonzero twist into its screw.

    With nonzero angular part w: direction w/|w|, pitch (w.v)/|w|^2 and axis
    point (w x v)/|w|^2 (the point on the axis closest to the origin). A twist
    with zero angular part is a pure translation. The axis point is a gauge
    choice: any point on the axis describes the same motion.
    """
    w = t.angular
    v = t.linear
    wn = w.norm()
    if wn <= ZERO_ANGULAR_TOL:
        if v.norm() <= ZERO_ANGULAR_TOL:
            raise ValueError("degenerate twist: zero angular and linear parts")
        return PureTranslation(v.normalized())
    wn2 = wn * wn
    pitch = w.dot(v) / wn2
    axis_point = w.cross(v) * (1.0 / wn2)
    return Screw(axis_point, w.normalized(), pitch)
