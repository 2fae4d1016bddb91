"""Closed-form manipulation laws and static friction-feasibility windows.

These are the hand-derivable special cases of the general motion solver: a
flat object dragged across a surface by lifting or lowering the gripper with
parallel tilted rollers, a standing cylinder twirled by vertical gripper
motion with symmetric opposite pivots, and the static force inequalities that
bound the roller pivot angle for a slip-free pick and a compliant place. Each
kinematic law is cross-validated against ``solve_object_motion`` in the test
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grasp import AntipodalGrasp, BrakeState, Cylinder
from .screws import Twist, UnitVec3, Vec3, rodrigues_rotate
from .solver import EnvContact, MotionProblem, MotionSolution, solve_object_motion

# |sin(theta)| below this puts the rolling direction in the surface plane, so
# no object translation can accommodate the commanded normal velocity.
JAM_ANGLE_TOL = 1e-9


class KinematicJamError(ValueError):
    """Commanded motion is kinematically inconsistent with the roller angle."""


@dataclass(frozen=True)
class PickPlaceLoads:
    """Static loads of the pick-and-place analysis (all newtons).

    ``mu_roller`` is the rolling-direction coefficient of the unbraked roller
    (the pick relies on it to hold the object); ``mu_env`` the placement
    surface's coefficient (the place has to defeat it). ``f_normal`` is the
    measured surface reaction, an input rather than a solved quantity.
    """

    f_obj: float
    f_grip: float
    f_normal: float
    mu_roller: float
    mu_env: float

    def __post_init__(self) -> None:
        if self.f_obj < 0.0 or self.f_normal < 0.0:
            raise ValueError("forces must be nonnegative")
        if self.f_grip <= 0.0:
            raise ValueError("gripping force must be positive")
        if self.mu_roller < 0.0 or self.mu_env < 0.0:
            raise ValueError("friction coefficients must be nonnegative")


@dataclass(frozen=True)
class AngleWindow:
    """Open interval of pivot angles (rad) feasible for pick-and-place.

    Endpoints are exclusive; ``feasible`` is equivalent to lower < upper with
    both bounds inside (0, pi/2). An infeasibility detected before the bounds
    can be formed closes the window at pi/2 and records the reason.
    """

    lower: float
    upper: float
    feasible: bool
    reason: str | None = None


def planar_drag_velocity(
    theta: float, nu_ee: float, frames: tuple[UnitVec3, UnitVec3]
) -> Vec3:
    """Stationary-frame velocity of a flat object dragged on a surface.

    Both rollers share pivot ``theta``; the gripper moves along the surface
    normal at ``nu_ee``. The object slides so its surface-normal velocity stays
    zero, which fixes the tangential rolling rate at -nu_ee / sin(theta) and
    leaves a horizontal speed of nu_ee * cot(theta). ``frames`` carries
    (grasp normal, surface normal), which must be perpendicular.
    """
    n_grasp, n_surface = frames
    if abs(n_grasp.dot(n_surface)) > 1e-9:
        raise ValueError("grasp normal and surface normal must be perpendicular")
    s = math.sin(theta)
    if abs(s) < JAM_ANGLE_TOL:
        raise KinematicJamError("kinematic jam: rolling direction in surface plane")
    axis = rodrigues_rotate(n_grasp, theta, n_surface).normalized()
    tangent = axis.cross(n_grasp)
    return tangent * (-nu_ee / s) + n_surface * nu_ee


def cylinder_twirl_rate(theta: float, radius: float, nu_ee: float) -> float:
    """Spin rate (rad/s) of a standing cylinder under vertical gripper motion.

    Rollers pivoted to opposite angles of magnitude ``theta`` constrain the
    cylinder to a screw about its own axis with pitch radius * tan(theta); a
    vertical gripper speed ``nu_ee`` therefore twirls it at
    nu_ee / (radius * tan(theta)). The sign matches a grasp with finger 1 at
    -theta and finger 2 at +theta. At theta = +-90 deg the vertical motion
    passes straight through (rate 0); near theta = 0 the screw has no vertical
    travel and the commanded motion jams.
    """
    if radius <= 0.0:
        raise ValueError("cylinder radius must be positive")
    c = math.cos(theta)
    if abs(c) < JAM_ANGLE_TOL:
        return 0.0
    t = math.tan(theta)
    if abs(t) < JAM_ANGLE_TOL:
        raise KinematicJamError("kinematic jam: rollers aligned with surface normal")
    return nu_ee / (radius * t)


def pick_upper_bound(loads: PickPlaceLoads) -> float:
    """Largest pivot angle (exclusive, rad) for a slip-free pick.

    Lifting is slip-free while the weight's rolling-direction component stays
    below the roller friction: f_obj * sin(theta) < mu_roller * f_grip. A
    ratio of 1 or more saturates to pi/2: no pivot angle can shed the object.
    """
    if loads.f_obj <= 0.0:
        raise ValueError("object weight must be positive")
    ratio = loads.mu_roller * loads.f_grip / loads.f_obj
    if ratio >= 1.0:
        return math.pi / 2
    return math.asin(ratio)


def place_lower_bound(loads: PickPlaceLoads) -> float:
    """Smallest pivot angle (exclusive, rad) at which the object slides on
    early surface contact instead of transmitting force.

    Requires the surface reaction to exceed twice the object weight; below
    that no angle lets the object escape sideways. The bound itself is
    arctan(mu_env / (1 - 2 f_obj / f_normal)) and grows with surface friction.
    """
    if loads.f_normal <= 2.0 * loads.f_obj:
        raise ValueError("infeasible: normal force below 2x weight")
    return math.atan(loads.mu_env / (1.0 - 2.0 * loads.f_obj / loads.f_normal))


def pick_place_window(loads: PickPlaceLoads) -> AngleWindow:
    """Feasible pivot-angle window combining the pick and place bounds."""
    try:
        upper = pick_upper_bound(loads)
    except ValueError as exc:
        return AngleWindow(lower=math.pi / 2, upper=0.0, feasible=False, reason=str(exc))
    try:
        lower = place_lower_bound(loads)
    except ValueError as exc:
        return AngleWindow(lower=math.pi / 2, upper=upper, feasible=False, reason=str(exc))
    return AngleWindow(lower=lower, upper=upper, feasible=lower < upper)


def asymmetric_roll_step(
    grasp: AntipodalGrasp,
    cylinder: Cylinder,
    table: EnvContact,
    ee_twist: Twist,
) -> MotionSolution:
    """One rolling impulse on a lying cylinder with asymmetric brake states.

    With one roller braked, vertical gripper motion rotates the cylinder about
    the braked contact: the braked side tracks the fingertip while the unbraked
    side slips along its free rolling direction, and the table keeps the
    cylinder height fixed (it spins in place between the jaws, sliding on the
    surface). Alternating the braked side with the motion direction keeps the
    rotation sense, so repeated strokes accumulate. With both rollers braked a
    moving gripper pressed against the table jams; with neither braked nothing
    drives the spin and the motion is underdetermined.
    """
    braked = sum(f.brake is BrakeState.BRAKED for f in grasp.fingers())
    if braked == 1 and abs(cylinder.axis.dot(grasp.grasp_normal)) > 0.5:
        raise ValueError("rolling requires the cylinder axis across the jaws")
    return solve_object_motion(MotionProblem(grasp, cylinder, (table,), ee_twist))
