"""Shared helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np

from rollergrasp.grasp import AntipodalGrasp, RollerFinger
from rollergrasp.screws import UnitVec3, Vec3


def random_unit(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-3:
            return v / n


def random_perpendicular(rng: np.random.Generator, n: np.ndarray) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        v -= np.dot(v, n) * n
        nn = np.linalg.norm(v)
        if nn > 1e-3:
            return v / nn


def random_generic_grasp(rng: np.random.Generator) -> AntipodalGrasp:
    """Random antipodal grasp with distinct, non-parallel roller axes."""
    n = random_unit(rng)
    ref = random_perpendicular(rng, n)
    q = rng.uniform(-0.1, 0.1, size=3)
    gap = rng.uniform(0.02, 0.1)
    p1 = q + 0.5 * gap * n
    p2 = q - 0.5 * gap * n
    while True:
        theta1 = rng.uniform(-math.pi, math.pi)
        theta2 = rng.uniform(-math.pi, math.pi)
        if abs(math.sin(theta1 - theta2)) > 1e-3:
            break
    return AntipodalGrasp(
        finger1=RollerFinger(Vec3.from_array(p1), theta1),
        finger2=RollerFinger(Vec3.from_array(p2), theta2),
        grasp_normal=UnitVec3.from_array(n),
        reference_normal=UnitVec3.from_array(ref),
    )


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (rad) between the column spans of a and b."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    sv = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))
