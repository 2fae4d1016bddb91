"""Two-roller antipodal grasp model: constraint matrix and free-motion screws.

A parallel-jaw gripper with one pivotable roller per fingertip holds an object
between two opposed contacts. Each free-spinning roller forbids relative
contact velocity along its rolling axis and along the jaw normal, and the soft
contact forbids relative spin about the jaw normal. Those constraints stack
into a rank-4 matrix over the 6-vector relative twist [angular | linear]; its
2-dimensional kernel is spanned by two screws through the contact midpoint
whose axes are the internal and external bisectors of the roller axes (a
rotation plus a pure tangential translation when the axes are parallel).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .screws import (
    Frame,
    PureTranslation,
    Screw,
    ScrewMotion,
    Twist,
    UnitVec3,
    Vec3,
    rodrigues_rotate,
    twist_from_screw,
)

# Geometric consistency tolerance for grasp invariants (perpendicular/parallel
# checks on unit vectors and contact positions).
GRASP_GEOMETRY_TOL = 1e-9

# Singular values below this times the largest one count as zero when ranking
# the constraint matrix.
RANK_REL_TOL = 1e-10

# Roller axes whose unit vectors differ (as lines) by less than this are
# routed to the degenerate parallel-axis branch; bisector normalization is
# ill-conditioned below it.
PARALLEL_AXIS_TOL = 1e-8

# Angular tolerance for matching a bisector screw to a cylinder's
# zero-curvature direction.
CYLINDER_ALIGN_TOL = 1e-6

# Default roller module dimensions (m): module width/thickness/length, roller
# diameter and roller-group width of the physical fingertip unit.
MODULE_WIDTH = 0.041
MODULE_THICKNESS = 0.0275
MODULE_LENGTH = 0.092
ROLLER_DIAMETER = 0.0092
ROLLER_GROUP_WIDTH = 0.0225


class BrakeState(Enum):
    BRAKED = "braked"
    UNBRAKED = "unbraked"


@dataclass(frozen=True)
class RollerFinger:
    """One fingertip: contact point, roller pivot angle, brake state, and the
    braked/unbraked breakaway friction coefficients of its roller pad."""

    contact_point: Vec3
    pivot_angle: float
    brake: BrakeState = BrakeState.UNBRAKED
    mu_braked: float = 0.809
    mu_unbraked: float = 0.029

    def __post_init__(self) -> None:
        if not -math.pi < self.pivot_angle <= math.pi:
            raise ValueError(f"pivot angle {self.pivot_angle} outside (-pi, pi]")
        if self.mu_braked < 0.0 or self.mu_unbraked < 0.0:
            raise ValueError("friction coefficients must be nonnegative")
        if self.mu_unbraked > self.mu_braked:
            raise ValueError("unbraked friction must not exceed braked friction")


@dataclass(frozen=True)
class AntipodalGrasp:
    """Antipodal two-roller grasp.

    ``grasp_normal`` points from finger2's contact toward finger1's contact and
    must be parallel to the contact separation. ``reference_normal`` is the
    direction a roller axis takes at pivot angle zero; it must be perpendicular
    to the grasp normal so pivot angles are well defined. Roller axes are
    derived by rotating the reference normal about the grasp normal.
    """

    finger1: RollerFinger
    finger2: RollerFinger
    grasp_normal: UnitVec3
    reference_normal: UnitVec3

    def __post_init__(self) -> None:
        sep = self.finger1.contact_point - self.finger2.contact_point
        gap = sep.norm()
        if gap <= 0.0:
            raise ValueError("not antipodal: coincident contact points")
        misalign = (sep * (1.0 / gap) - self.grasp_normal).norm()
        if misalign > GRASP_GEOMETRY_TOL:
            raise ValueError(
                f"not antipodal: contact separation deviates from grasp normal by {misalign:.3e}"
            )
        if abs(self.reference_normal.dot(self.grasp_normal)) > GRASP_GEOMETRY_TOL:
            raise ValueError("reference normal must be perpendicular to grasp normal")

    @cached_property
    def roller_axis1(self) -> UnitVec3:
        return roller_axis(self, 1)

    @cached_property
    def roller_axis2(self) -> UnitVec3:
        return roller_axis(self, 2)

    @property
    def midpoint(self) -> Vec3:
        return (self.finger1.contact_point + self.finger2.contact_point) * 0.5

    @property
    def gap(self) -> float:
        return (self.finger1.contact_point - self.finger2.contact_point).norm()

    def fingers(self) -> tuple[RollerFinger, RollerFinger]:
        return (self.finger1, self.finger2)


def roller_axis(grasp: AntipodalGrasp, finger_index: int) -> UnitVec3:
    """Roller axis of finger 1 or 2: the reference normal rotated about the
    grasp normal by that finger's pivot angle. Perpendicular to the grasp
    normal by construction."""
    if finger_index == 1:
        theta = grasp.finger1.pivot_angle
    elif finger_index == 2:
        theta = grasp.finger2.pivot_angle
    else:
        raise ValueError(f"finger index must be 1 or 2, got {finger_index}")
    rotated = rodrigues_rotate(grasp.grasp_normal, theta, grasp.reference_normal)
    return rotated.normalized()


# --- geometry variants -------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class Cylinder:
    radius: float
    axis: UnitVec3

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("cylinder radius must be positive")


@dataclass(frozen=True)
class FlatBox:
    """Locally flat contact patches on both sides; carries no extent data."""


@dataclass(frozen=True)
class GeneralCurved:
    """Generic smooth object: two principal curvatures at each contact (1/m)."""

    curvatures1: tuple[float, float]
    curvatures2: tuple[float, float]

    def __post_init__(self) -> None:
        for k in (*self.curvatures1, *self.curvatures2):
            if not math.isfinite(k):
                raise ValueError("principal curvatures must be finite")


ObjectGeometry = Sphere | Cylinder | FlatBox | GeneralCurved


# --- constraint matrix -------------------------------------------------------

ROW_LABELS = ("roll1", "roll2", "line", "spin")


@dataclass(frozen=True, eq=False)
class ConstraintMatrix:
    """4x6 grasp constraint matrix over the relative twist [angular | linear].

    Rows: one rolling-axis row per finger [(p_i x w_i) | w_i], one shared
    normal-translation row [(q x n) | n] taken at the contact midpoint, and the
    spin row [n | 0]. Rows model free-rolling (unbraked) contacts; brake states
    are layered on by the motion solver.
    """

    rows: np.ndarray
    labels: tuple[str, ...] = field(default=ROW_LABELS)

    def __post_init__(self) -> None:
        if self.rows.shape != (4, 6):
            raise ValueError(f"constraint matrix must be 4x6, got {self.rows.shape}")

    @property
    def rank(self) -> int:
        svals = np.linalg.svd(self.rows, compute_uv=False)
        return int(np.sum(svals > RANK_REL_TOL * svals[0]))


def _row(moment: Vec3, direction: Vec3) -> np.ndarray:
    return np.concatenate([moment.as_array(), direction.as_array()])


def rolling_row(contact_point: Vec3, axis: UnitVec3) -> np.ndarray:
    """Row annihilating relative contact velocity along a roller axis."""
    return _row(contact_point.cross(axis), axis)


def build_constraint_matrix(grasp: AntipodalGrasp) -> ConstraintMatrix:
    """Assemble the 4x6 constraint matrix of an antipodal roller grasp.

    Every twist admissible under the (unbraked) grasp is annihilated by the
    returned matrix; for valid grasps the rank is exactly 4.
    """
    w1 = grasp.roller_axis1
    w2 = grasp.roller_axis2
    n = grasp.grasp_normal
    q = grasp.midpoint
    rows = np.vstack(
        [
            rolling_row(grasp.finger1.contact_point, w1),
            rolling_row(grasp.finger2.contact_point, w2),
            _row(q.cross(n), n),
            np.concatenate([n.as_array(), np.zeros(3)]),
        ]
    )
    m = ConstraintMatrix(rows)
    if m.rank != 4:
        # unreachable for grasps satisfying the antipodal invariants
        raise ValueError(f"degenerate grasp: constraint matrix rank {m.rank} != 4")
    return m


def numeric_null_space(m: ConstraintMatrix | np.ndarray, tol: float = RANK_REL_TOL) -> list[Twist]:
    """Orthonormal kernel basis of a constraint matrix, as end-effector-relative
    twists. Dimension is 6 minus the numerical rank at ``tol`` (relative to the
    largest singular value); each basis twist x satisfies |M x| <= tol * |M|."""
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    rows = m.rows if isinstance(m, ConstraintMatrix) else np.asarray(m, dtype=np.float64)
    _, svals, vt = np.linalg.svd(rows)
    smax = svals[0] if svals.size else 0.0
    rank = int(np.sum(svals > tol * smax)) if smax > 0.0 else 0
    return [Twist.from_array(vt[i], Frame.EE) for i in range(rank, vt.shape[0])]


# --- analytic free screws ----------------------------------------------------


def _screw_pitch(grasp: AntipodalGrasp, direction: UnitVec3) -> float:
    """Pitch making the screw (direction, through midpoint) lie in the kernel.

    Substitutes the screw-form twist into finger1's rolling row and solves the
    resulting scalar equation; finger2's row then holds by antipodal symmetry.
    """
    p1 = grasp.finger1.contact_point
    w1 = grasp.roller_axis1
    q = grasp.midpoint
    denom = w1.dot(direction)
    moment_term = p1.cross(w1).dot(direction) + w1.dot(-direction.cross(q))
    return -moment_term / denom


def analytic_free_screws(grasp: AntipodalGrasp) -> tuple[ScrewMotion, ScrewMotion]:
    """Closed-form basis of the grasp's free motions.

    Non-parallel roller axes: two rotational screws through the contact
    midpoint along the internal and external bisectors of the roller axes,
    pitches solved so each lies in the constraint-matrix kernel. Parallel axes
    (as lines, so anti-parallel unit vectors included): the zero-pitch rotation
    about the common axis through the midpoint plus the pure translation along
    the tangential direction axis x normal.
    """
    w1 = grasp.roller_axis1
    w2 = grasp.roller_axis2
    q = grasp.midpoint
    same = (w1 - w2).norm() < PARALLEL_AXIS_TOL
    opposite = (w1 + w2).norm() < PARALLEL_AXIS_TOL
    if same or opposite:
        tangent = w1.cross(grasp.grasp_normal).normalized()
        return (Screw(q, w1, 0.0), PureTranslation(tangent))
    internal = (w1 + w2).normalized()
    external = (w1 - w2).normalized()
    return (
        Screw(q, internal, _screw_pitch(grasp, internal)),
        Screw(q, external, _screw_pitch(grasp, external)),
    )


# --- mobility classification -------------------------------------------------


class MobilityKind(Enum):
    TWO_DOF = "two-dof"
    ONE_DOF = "one-dof"
    FIXED = "fixed"
    TRANSLATION_ONLY = "translation-only"


@dataclass(frozen=True)
class MobilityClass:
    """First-order mobility of a grasped object: which of the grasp's free
    screws survive the object's contact geometry."""

    kind: MobilityKind
    motions: tuple[ScrewMotion, ...]
    spherical_about: Vec3 | None = None

    @property
    def dof(self) -> int:
        return len(self.motions)

    def basis_twists(self) -> list[Twist]:
        return [twist_from_screw(m, 1.0, Frame.EE) for m in self.motions]


def _aligned(direction: UnitVec3, axis: UnitVec3, tol: float = CYLINDER_ALIGN_TOL) -> bool:
    # alignment as lines: sign of the unit vector is irrelevant
    sine = direction.cross(axis).norm()
    return sine < tol and abs(direction.dot(axis)) > 0.5


def geometry_admissible_motions(grasp: AntipodalGrasp, geom: ObjectGeometry) -> MobilityClass:
    """Reduce the grasp's free screws by the object's contact geometry.

    Curved objects keep both free motions (a sphere's reduce to spherical
    rotation about the contact midpoint, flagged). Locally flat faces kill
    every rotational free motion because tilting a flat patch about an in-face
    axis violates contact at second order, leaving only the parallel-axis
    tangential translation. A cylinder keeps a motion only where rolling does
    not engage its flat direction: rotations aligned with the cylinder axis,
    and (parallel-axis case) the tangential translation, which contact
    migration accommodates for any cylinder orientation.
    """
    screws = analytic_free_screws(grasp)
    parallel = isinstance(screws[1], PureTranslation)

    if isinstance(geom, GeneralCurved):
        return MobilityClass(MobilityKind.TWO_DOF, screws)

    if isinstance(geom, Sphere):
        return MobilityClass(MobilityKind.TWO_DOF, screws, spherical_about=grasp.midpoint)

    if isinstance(geom, FlatBox):
        if parallel:
            return MobilityClass(MobilityKind.TRANSLATION_ONLY, (screws[1],))
        return MobilityClass(MobilityKind.FIXED, ())

    if isinstance(geom, Cylinder):
        if geom.axis.cross(grasp.grasp_normal).norm() < GRASP_GEOMETRY_TOL:
            raise ValueError(
                "invalid cylinder grasp: cylinder axis parallel to grasp normal"
            )
        kept: list[ScrewMotion] = []
        for motion in screws:
            if isinstance(motion, PureTranslation):
                kept.append(motion)
            elif _aligned(motion.axis_dir, geom.axis):
                kept.append(motion)
        if not kept:
            return MobilityClass(MobilityKind.FIXED, ())
        if len(kept) == 1:
            kind = (
                MobilityKind.TRANSLATION_ONLY
                if isinstance(kept[0], PureTranslation)
                else MobilityKind.ONE_DOF
            )
            return MobilityClass(kind, tuple(kept))
        return MobilityClass(MobilityKind.TWO_DOF, tuple(kept))

    raise TypeError(f"unsupported geometry: {type(geom).__name__}")
