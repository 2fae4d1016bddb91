"""Quasi-static motion solver for a roller-grasped object with environmental contact.

Given the grasp, the object geometry, any environmental surface contacts, and
the end-effector velocity, the solver assembles a linear system over the
object's twist relative to the end effector and classifies the outcome:

* the geometry-admissible free motions of the grasp form the solution subspace
  (everything outside it is blocked by the rollers or the object's own contact
  geometry);
* a braked finger replaces its rolling constraint with a full velocity match
  at the contact point, shrinking that subspace further;
* each environmental contact contributes the normal-velocity row
  [(p_e x n_e) | n_e] with right-hand side -nu_ee, where nu_ee is the
  end-effector velocity at the contact point projected on the contact normal,
  so the object's absolute normal velocity at the surface is zero; a no-slip
  contact adds the two tangential rows as well.

Environmental contacts are unilateral. A contact whose normal row cannot be
satisfied by any admissible motion is resolved by the sign of nu_ee: the
gripper carrying the object off the surface (nu_ee > 0) deactivates the
contact, while pressing into it (nu_ee < 0) jams the system. Contacts whose
row is satisfiable stay active regardless of the sign of nu_ee; in the
supported-from-below scenarios gravity is what maintains them, and modeling
forces is out of scope here.

All solves are pure functions of immutable inputs and safe to run in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grasp import (
    AntipodalGrasp,
    BrakeState,
    MobilityClass,
    ObjectGeometry,
    RollerFinger,
    geometry_admissible_motions,
)
from .screws import (
    Frame,
    ScrewMotion,
    Twist,
    UnitVec3,
    Vec3,
    point_velocity,
    screw_from_twist,
)

# Least-squares residual above this times |rhs| marks a kinematically
# inconsistent (jammed) system rather than round-off.
JAM_RESIDUAL_RTOL = 1e-6

# A constraint row whose projection onto the admissible subspace is below this
# (relative to the row norm) cannot be satisfied by any admissible motion.
ROW_PROJECTION_TOL = 1e-9

# |nu_ee| below this counts as neither pressing nor separating.
NU_ZERO_TOL = 1e-12


class FrictionMode(Enum):
    NORMAL_ONLY = "normal-only"
    NO_SLIP = "no-slip"


@dataclass(frozen=True)
class EnvContact:
    """Unilateral contact with a static environmental surface.

    ``normal`` points from the surface into the object. ``mu_env`` is the
    surface friction coefficient (used by the static feasibility analyses, not
    by the velocity solve). ``NO_SLIP`` mode additionally pins the tangential
    surface velocity to zero, for maneuvers that rely on tangential sticking.
    """

    point: Vec3
    normal: UnitVec3
    mu_env: float = 0.0
    friction_mode: FrictionMode = FrictionMode.NORMAL_ONLY

    def __post_init__(self) -> None:
        if self.mu_env < 0.0:
            raise ValueError("environmental friction coefficient must be nonnegative")


@dataclass(frozen=True)
class MotionProblem:
    """One solve instance: grasp + object geometry + contacts + commanded motion.

    All points are coordinates relative to the end-effector frame origin at the
    instant of the solve; ``ee_twist`` is the end effector's stationary-frame
    twist expressed at that same origin.
    """

    grasp: AntipodalGrasp
    geometry: ObjectGeometry
    contacts: tuple[EnvContact, ...] = ()
    ee_twist: Twist = Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.WORLD)

    def __post_init__(self) -> None:
        if self.ee_twist.frame is not Frame.WORLD:
            raise ValueError("end-effector twist must be tagged with the stationary frame")


class SolveStatus(Enum):
    UNIQUE = "unique"
    UNDERDETERMINED = "underdetermined"
    JAMMED = "jammed"


@dataclass(frozen=True)
class MotionSolution:
    """Outcome of a motion solve.

    ``object_twist_rel`` is relative to the end effector, ``object_twist_world``
    is the stationary-frame twist (relative plus end-effector motion at the
    shared origin). ``free_dims`` counts undriven degrees of freedom for
    underdetermined outcomes; their coordinates are reported as zero (the
    minimum-norm solution). ``inactive_contacts`` lists indices of contacts
    dropped because the gripper carries the object off the surface. A JAMMED
    outcome has no consistent motion at all; both twists are zero placeholders
    and ``residual`` carries the unresolvable velocity magnitude.
    """

    status: SolveStatus
    object_twist_rel: Twist
    object_twist_world: Twist
    residual: float
    free_dims: int = 0
    inactive_contacts: tuple[int, ...] = ()


def env_constraint_row(c: EnvContact, ee: Twist) -> tuple[np.ndarray, float]:
    """Normal-direction contact row on the relative twist, with its rhs.

    Row [(p_e x n_e) | n_e]; rhs -nu_ee with
    nu_ee = (v_ee - p_e x w_ee) . n_e, so that the object's absolute velocity
    at the contact has zero component along the surface normal.
    """
    nu_ee = point_velocity(ee, c.point).dot(c.normal)
    row = np.concatenate([c.point.cross(c.normal).as_array(), c.normal.as_array()])
    return row, -nu_ee


def _tangent_basis(n: UnitVec3) -> tuple[UnitVec3, UnitVec3]:
    seed = Vec3(1.0, 0.0, 0.0) if abs(n.x) < 0.9 else Vec3(0.0, 1.0, 0.0)
    t1 = n.cross(seed).normalized()
    t2 = n.cross(t1).normalized()
    return t1, t2


def env_constraint_rows(c: EnvContact, ee: Twist) -> tuple[np.ndarray, np.ndarray]:
    """All constraint rows of a contact: the normal row, plus two tangential
    velocity-cancellation rows in no-slip mode. Returns (rows, rhs) with the
    normal row first."""
    rows = []
    rhs = []
    row_n, rhs_n = env_constraint_row(c, ee)
    rows.append(row_n)
    rhs.append(rhs_n)
    if c.friction_mode is FrictionMode.NO_SLIP:
        for t in _tangent_basis(c.normal):
            rows.append(np.concatenate([c.point.cross(t).as_array(), t.as_array()]))
            rhs.append(-point_velocity(ee, c.point).dot(t))
    return np.vstack(rows), np.array(rhs)


def braked_contact_rows(finger: RollerFinger, grasp: AntipodalGrasp) -> np.ndarray:
    """Rows forcing zero relative linear velocity at a braked finger's contact.

    Three homogeneous rows, one per coordinate direction; together with the
    grasp's shared spin row they make the braked contact behave as a rigid
    soft contact. Replaces the finger's rolling row in the assembly.
    """
    if finger.brake is not BrakeState.BRAKED:
        raise ValueError("braked contact rows requested for an unbraked finger")
    p = finger.contact_point
    rows = []
    for e in (Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)):
        rows.append(np.concatenate([p.cross(e).as_array(), e.as_array()]))
    return np.vstack(rows)


def _admissible_basis(grasp: AntipodalGrasp, mobility: MobilityClass) -> np.ndarray:
    """6 x k orthonormal basis of the geometry-admissible relative twists."""
    if mobility.dof == 0:
        return np.zeros((6, 0))
    raw = np.column_stack([t.as_array() for t in mobility.basis_twists()])
    q, r = np.linalg.qr(raw)
    keep = np.abs(np.diag(r)) > 1e-12
    return q[:, keep]


def _restrict_by_brakes(grasp: AntipodalGrasp, basis: np.ndarray) -> np.ndarray:
    braked = [f for f in grasp.fingers() if f.brake is BrakeState.BRAKED]
    if not braked or basis.shape[1] == 0:
        return basis
    rows = np.vstack([braked_contact_rows(f, grasp) for f in braked])
    reduced = rows @ basis
    _, svals, vt = np.linalg.svd(reduced)
    smax = svals[0] if svals.size else 0.0
    rank = int(np.sum(svals > 1e-12 * max(smax, 1.0)))
    kernel = vt[rank:].T
    return basis @ kernel


def solve_object_motion(p: MotionProblem) -> MotionSolution:
    """Solve for the object's relative and stationary-frame twists.

    Assembly: geometry-admissible grasp motions as the solution subspace,
    braked-finger velocity-match rows, then each environmental contact's rows
    (unilateral handling as described in the module docstring). Exactly
    determined systems give UNIQUE, consistent rank-deficient ones give
    UNDERDETERMINED with the minimum-norm twist, inconsistent ones JAMMED.
    """
    mobility = geometry_admissible_motions(p.grasp, p.geometry)
    basis = _restrict_by_brakes(p.grasp, _admissible_basis(p.grasp, mobility))

    inactive: list[int] = []
    jam_violation = 0.0
    kept_rows: list[np.ndarray] = []
    kept_rhs: list[float] = []
    for index, contact in enumerate(p.contacts):
        rows, rhs = env_constraint_rows(contact, p.ee_twist)
        normal_row = rows[0]
        projection = normal_row @ basis if basis.shape[1] else np.zeros(0)
        reachable = np.linalg.norm(projection) > ROW_PROJECTION_TOL * np.linalg.norm(normal_row)
        nu_ee = -rhs[0]
        if not reachable:
            if nu_ee > NU_ZERO_TOL:
                inactive.append(index)
                continue
            if nu_ee < -NU_ZERO_TOL:
                jam_violation = max(jam_violation, -nu_ee)
                continue
            # vacuous: surface neither approached nor left; keep as active
            # with a trivially satisfied row
            continue
        kept_rows.append(rows)
        kept_rhs.append(rhs)

    zero_rel = Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.EE)
    zero_world = Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.WORLD)
    if jam_violation > 0.0:
        # a pressed contact no admissible motion can accommodate wedges the
        # whole system; report zero motion with the violated speed as residual
        return MotionSolution(
            SolveStatus.JAMMED,
            zero_rel,
            zero_world,
            residual=jam_violation,
            inactive_contacts=tuple(inactive),
        )

    k = basis.shape[1]
    if not kept_rows:
        status = SolveStatus.UNIQUE if k == 0 else SolveStatus.UNDERDETERMINED
        return MotionSolution(
            status,
            zero_rel,
            p.ee_twist,
            residual=0.0,
            free_dims=k,
            inactive_contacts=tuple(inactive),
        )

    a_full = np.vstack(kept_rows)
    b_full = np.concatenate(kept_rhs)
    a = a_full @ basis if k else np.zeros((a_full.shape[0], 0))
    rhs_scale = max(float(np.linalg.norm(b_full)), NU_ZERO_TOL)

    if k == 0:
        residual = float(np.linalg.norm(b_full))
        if residual > JAM_RESIDUAL_RTOL * rhs_scale:
            return MotionSolution(
                SolveStatus.JAMMED, zero_rel, zero_world, residual,
                inactive_contacts=tuple(inactive),
            )
        return MotionSolution(
            SolveStatus.UNIQUE, zero_rel, p.ee_twist, residual,
            inactive_contacts=tuple(inactive),
        )

    z, _, rank, _ = np.linalg.lstsq(a, b_full, rcond=None)
    residual = float(np.linalg.norm(a @ z - b_full))
    if residual > JAM_RESIDUAL_RTOL * rhs_scale:
        return MotionSolution(
            SolveStatus.JAMMED, zero_rel, zero_world, residual,
            inactive_contacts=tuple(inactive),
        )

    rel = Twist.from_array(basis @ z, Frame.EE)
    world = rel.with_frame(Frame.WORLD) + p.ee_twist
    free = k - int(rank)
    status = SolveStatus.UNIQUE if free == 0 else SolveStatus.UNDERDETERMINED
    return MotionSolution(
        status, rel, world, residual,
        free_dims=free, inactive_contacts=tuple(inactive),
    )


@dataclass(frozen=True)
class MobilityReport:
    """Mobility of a statically held object: the geometry-level class plus the
    free motions that survive the active environmental contacts."""

    geometry_mobility: MobilityClass
    free_dims: int
    free_motions: tuple[ScrewMotion, ...]


def classify_mobility(p: MotionProblem) -> MobilityReport:
    """Remaining free motions of the object under a stationary end effector.

    The geometry-admissible subspace is reduced by the braked fingers'
    velocity-match rows and by every contact's (homogeneous) constraint rows;
    whatever survives is reported as screws.
    """
    if p.ee_twist.norm() > 0.0:
        raise ValueError("mobility classification requires a zero end-effector twist")
    mobility = geometry_admissible_motions(p.grasp, p.geometry)
    basis = _restrict_by_brakes(p.grasp, _admissible_basis(p.grasp, mobility))
    if basis.shape[1] and p.contacts:
        rows = np.vstack([env_constraint_rows(c, p.ee_twist)[0] for c in p.contacts])
        reduced = rows @ basis
        _, svals, vt = np.linalg.svd(reduced)
        smax = svals[0] if svals.size else 0.0
        rank = int(np.sum(svals > 1e-12 * max(smax, 1.0)))
        basis = basis @ vt[rank:].T
    motions = tuple(
        screw_from_twist(Twist.from_array(basis[:, i], Frame.EE))
        for i in range(basis.shape[1])
    )
    return MobilityReport(mobility, basis.shape[1], motions)
