"""Scenario file schema: the JSON input of the simulator, CLI, and service.

Top-level keys are {name, object, grasp, environment, steps} plus an optional
gripper position. Angles in the file are degrees, lengths meters, forces
newtons; unknown keys are rejected so typos surface as schema errors naming
the offending field.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Triple = Annotated[list[float], Field(min_length=3, max_length=3)]
Pair = Annotated[list[float], Field(min_length=2, max_length=2)]


class ScenarioError(ValueError):
    """Semantic scenario problem (inconsistent initial state, bad file)."""


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SphereSpec(_StrictModel):
    kind: Literal["sphere"]
    radius: Annotated[float, Field(gt=0)]


class CylinderSpec(_StrictModel):
    kind: Literal["cylinder"]
    radius: Annotated[float, Field(gt=0)]
    # world-frame direction at scenario start; tracked with the object afterwards
    axis: Triple


class FlatBoxSpec(_StrictModel):
    kind: Literal["flat_box"]


class GeneralCurvedSpec(_StrictModel):
    kind: Literal["general_curved"]
    curvatures1: Pair
    curvatures2: Pair


GeometrySpec = Annotated[
    Union[SphereSpec, CylinderSpec, FlatBoxSpec, GeneralCurvedSpec],
    Field(discriminator="kind"),
]


class OrientationSpec(_StrictModel):
    axis: Triple = [0.0, 0.0, 1.0]
    angle_deg: float = 0.0


class ObjectSpec(_StrictModel):
    geometry: GeometrySpec
    # reference point tracked through the simulation: the center for spheres
    # and lying cylinders, the supporting face point for flat boxes and
    # standing cylinders
    position: Triple
    orientation: OrientationSpec = OrientationSpec()


class GraspSpec(_StrictModel):
    # fingertip contact offsets from the gripper position, gripper frame
    offset1: Triple
    offset2: Triple
    # must point from contact 2 toward contact 1
    grasp_normal: Triple
    # roller axis direction at pivot angle zero; perpendicular to grasp_normal
    reference_normal: Triple
    mu_braked: Annotated[float, Field(ge=0)] = 0.809
    mu_unbraked: Annotated[float, Field(ge=0)] = 0.029


class SurfaceSpec(_StrictModel):
    point: Triple
    normal: Triple
    mu: Annotated[float, Field(ge=0)] = 0.0
    mode: Literal["normal-only", "no-slip"] = "normal-only"


class StepSpec(_StrictModel):
    duration: Annotated[float, Field(gt=0)]
    pivot1_deg: float
    pivot2_deg: float
    brake1: bool = False
    brake2: bool = False
    ee_linear: Triple = [0.0, 0.0, 0.0]
    ee_angular_deg: Triple = [0.0, 0.0, 0.0]
    dt: Annotated[float, Field(gt=0)] = 0.001

    @model_validator(mode="after")
    def _dt_fits_duration(self) -> "StepSpec":
        if self.dt > self.duration:
            raise ValueError("dt must not exceed the step duration")
        return self


class ScenarioSpec(_StrictModel):
    name: str
    object: ObjectSpec
    grasp: GraspSpec
    environment: list[SurfaceSpec] = []
    # defaults to the object position
    gripper_position: Triple | None = None
    steps: Annotated[list[StepSpec], Field(min_length=1)]


def scenario_from_dict(data: dict) -> ScenarioSpec:
    return ScenarioSpec.model_validate(data)


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Read and validate a scenario file. Schema violations raise pydantic's
    ValidationError, which names the offending field."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: {exc}") from exc
    return scenario_from_dict(data)
