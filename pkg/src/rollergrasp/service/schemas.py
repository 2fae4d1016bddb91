"""Request/response models of the HTTP service (also used by the CLI client)."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..scenario import ScenarioSpec, Triple


class _ServiceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HealthResponse(_ServiceModel):
    status: str
    version: str


class QuaternionModel(_ServiceModel):
    w: float
    x: float
    y: float
    z: float


class TwistModel(_ServiceModel):
    angular: Triple
    linear: Triple
    frame: str


class MotionModel(_ServiceModel):
    """A free motion: a pitched rotation about an axis, or a pure translation."""

    type: Literal["screw", "translation"]
    axis_point: Triple | None = None
    axis_dir: Triple | None = None
    pitch: float | None = None
    direction: Triple | None = None


class MobilityRequest(_ServiceModel):
    scenario: ScenarioSpec
    step: int = Field(default=0, ge=0)


class MobilityResponse(_ServiceModel):
    kind: str
    spherical_about: Triple | None
    free_dims: int
    free_motions: list[MotionModel]


class SolveRequest(_ServiceModel):
    scenario: ScenarioSpec
    step: int = Field(default=0, ge=0)


class SolveResponse(_ServiceModel):
    status: str
    object_twist_rel: TwistModel
    object_twist_world: TwistModel
    residual: float
    free_dims: int
    inactive_contacts: list[int]


class SimulateRequest(_ServiceModel):
    scenario: ScenarioSpec


class TrajectoryRecordModel(_ServiceModel):
    t: float
    position: Triple
    orientation: QuaternionModel
    angular_velocity: Triple
    linear_velocity: Triple
    gripper_position: Triple
    gripper_orientation: QuaternionModel
    status: str
    active_contacts: list[int]


class SimulateResponse(_ServiceModel):
    name: str
    records: list[TrajectoryRecordModel]


class PickPlaceRequest(_ServiceModel):
    mu_r: float = Field(ge=0)
    mu_e: float = Field(ge=0)
    f_grip: float = Field(gt=0)
    f_obj: float = Field(ge=0)
    f_normal: float = Field(ge=0)


class PickPlaceResponse(_ServiceModel):
    lower_deg: float
    upper_deg: float
    feasible: bool
    reason: str | None = None


class FrictionRequest(_ServiceModel):
    material: str
    state: Literal["braked", "unbraked"]
    load: float | None = Field(default=None, ge=0)


class FrictionResponse(_ServiceModel):
    material: str
    state: str
    mu: float
    sd: float
    contrast_ratio: float
    breakaway_force: float | None = None


class MaterialsResponse(_ServiceModel):
    materials: list[str]
