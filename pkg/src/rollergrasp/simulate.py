"""Quasi-static multi-step scenario execution.

Each step fixes pivot angles, brake states, and an end-effector velocity for a
duration; within a step the object twist is re-solved every substep at the
current configuration and poses advance by first-order integration (axis-angle
exponential for orientation, renormalized). Contact points are recomputed
analytically from the object geometry every substep: fingertip contacts
migrate over spheres and cylinders so the grasp stays antipodal, and plane
contacts activate whenever the object's support point reaches the surface.

A jammed substep freezes both the object and the gripper for its duration
(advancing the gripper against a kinematically wedged object would penetrate)
and flags the record. Runs are deterministic: identical scenarios produce
byte-identical serialized trajectories.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .grasp import (
    AntipodalGrasp,
    BrakeState,
    Cylinder,
    FlatBox,
    GeneralCurved,
    ObjectGeometry,
    RollerFinger,
    Sphere,
)
from .scenario import ScenarioError, ScenarioSpec
from .screws import Frame, Twist, UnitVec3, Vec3, point_velocity
from .solver import (
    EnvContact,
    FrictionMode,
    MotionProblem,
    MotionSolution,
    SolveStatus,
    solve_object_motion,
)

# A support point within this of a surface counts as touching; penetration
# beyond it is an integration failure.
CONTACT_GAP_TOL = 1e-6

# Initial grasp contacts must land on the object surface within this.
CONSISTENCY_TOL = 1e-6

# |axis . surface normal| below this means a lying cylinder, above
# 1 - this a standing one; anything between is an unsupported oblique contact.
AXIS_ALIGN_TOL = 1e-6


class SimulationError(RuntimeError):
    """Contact recomputation or integration failure, with step context."""


# --- quaternion helpers (scalar-first storage) --------------------------------


def _quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def _quat_from_rotvec(rv: np.ndarray) -> np.ndarray:
    angle = float(np.linalg.norm(rv))
    if angle < 1e-300:
        return np.array([1.0, 0.0, 0.0, 0.0])
    axis = rv / angle
    half = 0.5 * angle
    return np.concatenate([[math.cos(half)], math.sin(half) * axis])


def _quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q)


def _quat_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


# --- compiled scenario ---------------------------------------------------------


def _wrap_angle(a: float) -> float:
    wrapped = math.remainder(a, 2 * math.pi)
    return math.pi if wrapped <= -math.pi else wrapped


def _unit(v, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(arr)
    if n < 1e-9:
        raise ScenarioError(f"{what} must be a nonzero vector")
    return arr / n


@dataclass(frozen=True)
class _CompiledStep:
    duration: float
    pivot1: float
    pivot2: float
    brake1: BrakeState
    brake2: BrakeState
    w_ee: np.ndarray
    v_ee: np.ndarray
    dt: float


@dataclass(frozen=True)
class CompiledScenario:
    name: str
    geometry_kind: str
    radius: float
    axis_local: np.ndarray | None
    curvatures: tuple[tuple[float, float], tuple[float, float]] | None
    offset1: np.ndarray
    offset2: np.ndarray
    normal0: np.ndarray
    ref0: np.ndarray
    mu_braked: float
    mu_unbraked: float
    surfaces: tuple[tuple[np.ndarray, np.ndarray, float, FrictionMode], ...]
    steps: tuple[_CompiledStep, ...]
    obj_pos0: np.ndarray
    obj_quat0: np.ndarray
    grip_pos0: np.ndarray


@dataclass(frozen=True)
class SimState:
    time: float
    obj_pos: np.ndarray
    obj_quat: np.ndarray
    grip_pos: np.ndarray
    grip_quat: np.ndarray


@dataclass(frozen=True)
class TrajectoryRecord:
    """One integration substep: poses after the substep, the stationary-frame
    twist applied during it (linear part = velocity of the object's tracked
    point), the solver status, and the surviving contact indices."""

    time: float
    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]  # (w, x, y, z)
    twist: Twist
    gripper_position: tuple[float, float, float]
    gripper_orientation: tuple[float, float, float, float]
    status: SolveStatus
    active_contacts: tuple[int, ...]


def compile_scenario(spec: ScenarioSpec) -> CompiledScenario:
    geom = spec.object.geometry
    kind = geom.kind
    obj_pos0 = np.asarray(spec.object.position, dtype=np.float64)
    rot_axis = np.asarray(spec.object.orientation.axis, dtype=np.float64)
    angle = math.radians(spec.object.orientation.angle_deg)
    if abs(angle) > 0.0:
        obj_quat0 = _quat_from_rotvec(_unit(rot_axis, "orientation axis") * angle)
    else:
        obj_quat0 = np.array([1.0, 0.0, 0.0, 0.0])

    radius = 0.0
    axis_local = None
    curvatures = None
    if kind == "sphere":
        radius = geom.radius
    elif kind == "cylinder":
        radius = geom.radius
        axis_world0 = _unit(geom.axis, "cylinder axis")
        axis_local = _quat_matrix(obj_quat0).T @ axis_world0
    elif kind == "general_curved":
        curvatures = (tuple(geom.curvatures1), tuple(geom.curvatures2))
        if spec.environment:
            raise ScenarioError(
                "environmental contact is unsupported for general_curved geometry"
            )

    steps = tuple(
        _CompiledStep(
            duration=s.duration,
            pivot1=_wrap_angle(math.radians(s.pivot1_deg)),
            pivot2=_wrap_angle(math.radians(s.pivot2_deg)),
            brake1=BrakeState.BRAKED if s.brake1 else BrakeState.UNBRAKED,
            brake2=BrakeState.BRAKED if s.brake2 else BrakeState.UNBRAKED,
            w_ee=np.radians(np.asarray(s.ee_angular_deg, dtype=np.float64)),
            v_ee=np.asarray(s.ee_linear, dtype=np.float64),
            dt=s.dt,
        )
        for s in spec.steps
    )

    grip_pos0 = (
        np.asarray(spec.gripper_position, dtype=np.float64)
        if spec.gripper_position is not None
        else obj_pos0.copy()
    )

    return CompiledScenario(
        name=spec.name,
        geometry_kind=kind,
        radius=radius,
        axis_local=axis_local,
        curvatures=curvatures,
        offset1=np.asarray(spec.grasp.offset1, dtype=np.float64),
        offset2=np.asarray(spec.grasp.offset2, dtype=np.float64),
        normal0=_unit(spec.grasp.grasp_normal, "grasp normal"),
        ref0=_unit(spec.grasp.reference_normal, "reference normal"),
        mu_braked=spec.grasp.mu_braked,
        mu_unbraked=spec.grasp.mu_unbraked,
        surfaces=tuple(
            (
                np.asarray(s.point, dtype=np.float64),
                _unit(s.normal, "surface normal"),
                s.mu,
                FrictionMode(s.mode),
            )
            for s in spec.environment
        ),
        steps=steps,
        obj_pos0=obj_pos0,
        obj_quat0=obj_quat0,
        grip_pos0=grip_pos0,
    )


def initial_state(rt: CompiledScenario) -> SimState:
    return SimState(
        time=0.0,
        obj_pos=rt.obj_pos0.copy(),
        obj_quat=rt.obj_quat0.copy(),
        grip_pos=rt.grip_pos0.copy(),
        grip_quat=np.array([1.0, 0.0, 0.0, 0.0]),
    )


# --- per-state geometry --------------------------------------------------------


def _axis_world(rt: CompiledScenario, state: SimState) -> np.ndarray:
    return _quat_matrix(state.obj_quat) @ rt.axis_local


def _support_point(rt: CompiledScenario, state: SimState, normal: np.ndarray) -> np.ndarray:
    if rt.geometry_kind == "sphere":
        return state.obj_pos - rt.radius * normal
    if rt.geometry_kind == "cylinder":
        alignment = abs(float(_axis_world(rt, state) @ normal))
        if alignment < AXIS_ALIGN_TOL:
            return state.obj_pos - rt.radius * normal  # lying: line contact below the axis
        if alignment > 1.0 - AXIS_ALIGN_TOL:
            return state.obj_pos  # standing: tracked point is the end-face center
        raise SimulationError(
            "cylinder-plane contact with an oblique axis is unsupported"
        )
    # flat box: the tracked point is the supporting face point
    return state.obj_pos


def _grasp_points(rt: CompiledScenario, state: SimState) -> tuple[np.ndarray, np.ndarray]:
    rot = _quat_matrix(state.grip_quat)
    normal = rot @ rt.normal0
    if rt.geometry_kind == "sphere":
        return state.obj_pos + rt.radius * normal, state.obj_pos - rt.radius * normal
    if rt.geometry_kind == "cylinder":
        axis = _axis_world(rt, state)
        grasp_center = state.grip_pos + rot @ (0.5 * (rt.offset1 + rt.offset2))
        on_axis = state.obj_pos + float((grasp_center - state.obj_pos) @ axis) * axis
        return on_axis + rt.radius * normal, on_axis - rt.radius * normal
    return state.grip_pos + rot @ rt.offset1, state.grip_pos + rot @ rt.offset2


def _geometry(rt: CompiledScenario, state: SimState) -> ObjectGeometry:
    if rt.geometry_kind == "sphere":
        return Sphere(rt.radius)
    if rt.geometry_kind == "cylinder":
        return Cylinder(rt.radius, UnitVec3.from_array(_axis_world(rt, state)))
    if rt.geometry_kind == "general_curved":
        return GeneralCurved(*rt.curvatures)
    return FlatBox()


def assemble_problem(
    rt: CompiledScenario,
    state: SimState,
    step: _CompiledStep,
    zero_ee: bool = False,
) -> tuple[MotionProblem, list[int]]:
    """Motion problem at the current configuration, in coordinates relative to
    the gripper origin, plus the indices of the touching surfaces."""
    rot = _quat_matrix(state.grip_quat)
    normal = rot @ rt.normal0
    ref = rot @ rt.ref0
    p1, p2 = _grasp_points(rt, state)
    grasp = AntipodalGrasp(
        finger1=RollerFinger(
            Vec3.from_array(p1 - state.grip_pos),
            step.pivot1,
            brake=step.brake1,
            mu_braked=rt.mu_braked,
            mu_unbraked=rt.mu_unbraked,
        ),
        finger2=RollerFinger(
            Vec3.from_array(p2 - state.grip_pos),
            step.pivot2,
            brake=step.brake2,
            mu_braked=rt.mu_braked,
            mu_unbraked=rt.mu_unbraked,
        ),
        grasp_normal=UnitVec3.from_array(normal),
        reference_normal=UnitVec3.from_array(ref),
    )

    contacts = []
    touching = []
    for index, (point, snormal, mu, mode) in enumerate(rt.surfaces):
        support = _support_point(rt, state, snormal)
        gap = float((support - point) @ snormal)
        if gap < -CONTACT_GAP_TOL:
            raise SimulationError(
                f"object penetrates surface {index} by {-gap:.3e} m"
            )
        if gap <= CONTACT_GAP_TOL:
            contacts.append(
                EnvContact(
                    Vec3.from_array(support - state.grip_pos),
                    UnitVec3.from_array(snormal),
                    mu_env=mu,
                    friction_mode=mode,
                )
            )
            touching.append(index)

    if zero_ee:
        ee = Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.WORLD)
    else:
        ee = Twist(Vec3.from_array(step.w_ee), Vec3.from_array(step.v_ee), Frame.WORLD)
    problem = MotionProblem(grasp, _geometry(rt, state), tuple(contacts), ee)
    return problem, touching


def _validate_initial_grasp(rt: CompiledScenario, state: SimState) -> None:
    if rt.geometry_kind not in ("sphere", "cylinder"):
        return
    rot = _quat_matrix(state.grip_quat)
    template1 = state.grip_pos + rot @ rt.offset1
    template2 = state.grip_pos + rot @ rt.offset2
    p1, p2 = _grasp_points(rt, state)
    worst = max(np.linalg.norm(template1 - p1), np.linalg.norm(template2 - p2))
    if worst > CONSISTENCY_TOL:
        raise ScenarioError(
            "initial pose inconsistent with grasp template: contact offsets miss "
            f"the object surface by {worst:.3e} m"
        )


def step_integrate(
    rt: CompiledScenario, state: SimState, step: _CompiledStep, dt: float
) -> tuple[SimState, TrajectoryRecord]:
    """Solve at the current configuration and advance one substep of length dt."""
    if dt <= 0.0:
        raise ValueError("substep must be positive")
    problem, touching = assemble_problem(rt, state, step)
    sol = solve_object_motion(problem)
    active = tuple(
        touching[i] for i in range(len(touching)) if i not in sol.inactive_contacts
    )

    if sol.status is SolveStatus.JAMMED:
        new_state = SimState(
            time=state.time + dt,
            obj_pos=state.obj_pos,
            obj_quat=state.obj_quat,
            grip_pos=state.grip_pos,
            grip_quat=state.grip_quat,
        )
        twist = Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.WORLD)
    else:
        world = sol.object_twist_world
        v_center = point_velocity(world, Vec3.from_array(state.obj_pos - state.grip_pos))
        w_arr = world.angular.as_array()
        new_state = SimState(
            time=state.time + dt,
            obj_pos=state.obj_pos + dt * v_center.as_array(),
            obj_quat=_quat_normalize(
                _quat_mul(_quat_from_rotvec(dt * w_arr), state.obj_quat)
            ),
            grip_pos=state.grip_pos + dt * step.v_ee,
            grip_quat=_quat_normalize(
                _quat_mul(_quat_from_rotvec(dt * step.w_ee), state.grip_quat)
            ),
        )
        twist = Twist(world.angular, v_center, Frame.WORLD)

    record = TrajectoryRecord(
        time=new_state.time,
        position=tuple(float(c) for c in new_state.obj_pos),
        orientation=tuple(float(c) for c in new_state.obj_quat),
        twist=twist,
        gripper_position=tuple(float(c) for c in new_state.grip_pos),
        gripper_orientation=tuple(float(c) for c in new_state.grip_quat),
        status=sol.status,
        active_contacts=active,
    )
    return new_state, record


def _substep_lengths(duration: float, dt: float) -> list[float]:
    full = int(math.floor(duration / dt + 1e-12))
    lengths = [dt] * full
    remainder = duration - full * dt
    if remainder > 1e-12:
        lengths.append(remainder)
    return lengths


def run_scenario(spec: ScenarioSpec) -> list[TrajectoryRecord]:
    """Execute every step of a scenario; deterministic for identical inputs.

    Jammed substeps are recorded, never skipped. Raises SimulationError with
    the step index on contact recomputation failure.
    """
    rt = compile_scenario(spec)
    state = initial_state(rt)
    _validate_initial_grasp(rt, state)
    records: list[TrajectoryRecord] = []
    for step_index, step in enumerate(rt.steps):
        for h in _substep_lengths(step.duration, step.dt):
            try:
                state, record = step_integrate(rt, state, step, h)
            except SimulationError as exc:
                raise SimulationError(f"step {step_index}: {exc}") from exc
            records.append(record)
    return records


def scenario_problem(
    spec: ScenarioSpec, step_index: int = 0, zero_ee: bool = False
) -> MotionProblem:
    """One-shot motion problem: the scenario's initial configuration with the
    given step's pivots, brakes, and (optionally zeroed) end-effector motion."""
    rt = compile_scenario(spec)
    if not 0 <= step_index < len(rt.steps):
        raise ScenarioError(
            f"step index {step_index} out of range (scenario has {len(rt.steps)} steps)"
        )
    state = initial_state(rt)
    _validate_initial_grasp(rt, state)
    problem, _ = assemble_problem(rt, state, rt.steps[step_index], zero_ee=zero_ee)
    return problem


def solve_scenario_step(spec: ScenarioSpec, step_index: int = 0) -> MotionSolution:
    return solve_object_motion(scenario_problem(spec, step_index))


# --- trajectory serialization ---------------------------------------------------

CSV_HEADER = "t,px,py,pz,qx,qy,qz,qw,wx,wy,wz,vx,vy,vz,status"


def _fmt(x: float) -> str:
    return repr(float(x))


def trajectory_csv(records: list[TrajectoryRecord]) -> str:
    """CSV with unit-quaternion orientation (x, y, z, w) and the
    stationary-frame twist; one row per substep."""
    lines = [CSV_HEADER]
    for r in records:
        qw, qx, qy, qz = r.orientation
        w = r.twist.angular
        v = r.twist.linear
        fields = [
            _fmt(r.time),
            *(_fmt(c) for c in r.position),
            _fmt(qx), _fmt(qy), _fmt(qz), _fmt(qw),
            _fmt(w.x), _fmt(w.y), _fmt(w.z),
            _fmt(v.x), _fmt(v.y), _fmt(v.z),
            r.status.value,
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def record_to_dict(r: TrajectoryRecord) -> dict:
    return {
        "t": r.time,
        "position": list(r.position),
        "orientation": {"w": r.orientation[0], "x": r.orientation[1],
                        "y": r.orientation[2], "z": r.orientation[3]},
        "angular_velocity": [r.twist.angular.x, r.twist.angular.y, r.twist.angular.z],
        "linear_velocity": [r.twist.linear.x, r.twist.linear.y, r.twist.linear.z],
        "gripper_position": list(r.gripper_position),
        "gripper_orientation": {"w": r.gripper_orientation[0], "x": r.gripper_orientation[1],
                                "y": r.gripper_orientation[2], "z": r.gripper_orientation[3]},
        "status": r.status.value,
        "active_contacts": list(r.active_contacts),
    }


def trajectory_json(records: list[TrajectoryRecord]) -> str:
    return json.dumps([record_to_dict(r) for r in records], indent=2) + "\n"
