"""Breakaway friction coefficients of the roller fingertip, braked vs unbraked.

The shipped table holds measured mean and standard deviation per contact
material. Braked coefficients depend strongly on the surface; unbraked ones
are dominated by roller bearing friction and sit an order of magnitude lower.
A JSON file can override the table, either by path or through the
``ROLLERGRASP_FRICTION_TABLE`` environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .grasp import BrakeState

STANDARD_GRAVITY = 9.80665  # m/s^2

FRICTION_TABLE_ENV = "ROLLERGRASP_FRICTION_TABLE"


@dataclass(frozen=True)
class FrictionCoefficient:
    mean: float
    sd: float = 0.0

    def __post_init__(self) -> None:
        if self.mean <= 0.0:
            raise ValueError("mean friction coefficient must be positive")
        if self.sd < 0.0:
            raise ValueError("friction standard deviation must be nonnegative")


@dataclass(frozen=True)
class MaterialFriction:
    braked: FrictionCoefficient
    unbraked: FrictionCoefficient

    def __post_init__(self) -> None:
        if self.unbraked.mean >= self.braked.mean:
            raise ValueError("unbraked friction must be below braked friction")


@dataclass(frozen=True)
class FrictionTable:
    entries: dict[str, MaterialFriction]

    def materials(self) -> list[str]:
        return sorted(self.entries)

    def get(self, material: str) -> MaterialFriction:
        key = material.lower()
        if key not in self.entries:
            known = ", ".join(self.materials())
            raise LookupError(f"unknown material {material!r}; known materials: {known}")
        return self.entries[key]


DEFAULT_TABLE = FrictionTable(
    {
        "plastic": MaterialFriction(FrictionCoefficient(0.809, 0.130), FrictionCoefficient(0.029, 0.015)),
        "glass": MaterialFriction(FrictionCoefficient(0.736, 0.162), FrictionCoefficient(0.034, 0.009)),
        "metal": MaterialFriction(FrictionCoefficient(0.491, 0.130), FrictionCoefficient(0.026, 0.013)),
        "wood": MaterialFriction(FrictionCoefficient(0.491, 0.037), FrictionCoefficient(0.024, 0.0030)),
    }
)


def load_friction_table(path: str | Path) -> FrictionTable:
    """Load a table from JSON: {material: {braked: {mean, sd}, unbraked: {mean, sd}}}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("friction table file must hold a JSON object")
    entries = {}
    for material, coeffs in raw.items():
        try:
            entries[material.lower()] = MaterialFriction(
                braked=FrictionCoefficient(**coeffs["braked"]),
                unbraked=FrictionCoefficient(**coeffs["unbraked"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed friction entry for {material!r}: {exc}") from exc
    return FrictionTable(entries)


def default_table() -> FrictionTable:
    """Shipped table, unless the override environment variable points elsewhere."""
    override = os.environ.get(FRICTION_TABLE_ENV)
    if override:
        return load_friction_table(override)
    return DEFAULT_TABLE


def _coefficient(table: FrictionTable, material: str, brake_state: BrakeState) -> FrictionCoefficient:
    entry = table.get(material)
    return entry.braked if brake_state is BrakeState.BRAKED else entry.unbraked


def lookup_mu(
    table: FrictionTable,
    material: str,
    brake_state: BrakeState,
    *,
    pessimistic: str | None = None,
) -> float:
    """Tabulated coefficient for a material and brake state.

    Point computations use the mean. ``pessimistic`` shifts it by one standard
    deviation: "driving" lowers friction you rely on, "resisting" raises
    friction you work against.
    """
    c = _coefficient(table, material, brake_state)
    if pessimistic is None:
        return c.mean
    if pessimistic == "driving":
        return max(c.mean - c.sd, 0.0)
    if pessimistic == "resisting":
        return c.mean + c.sd
    raise ValueError("pessimistic must be None, 'driving' or 'resisting'")


def breakaway_force(
    table: FrictionTable, material: str, brake_state: BrakeState, normal_load: float
) -> float:
    """Tangential force (N) at slip onset under ``normal_load`` (N)."""
    if normal_load < 0.0:
        raise ValueError("normal load must be nonnegative")
    return lookup_mu(table, material, brake_state) * normal_load


def contrast_ratio(table: FrictionTable, material: str) -> float:
    """Braked over unbraked mean coefficient."""
    entry = table.get(material)
    return entry.braked.mean / entry.unbraked.mean


def weight_newtons(mass_kg: float) -> float:
    """Weight of a mass under standard gravity."""
    return mass_kg * STANDARD_GRAVITY
