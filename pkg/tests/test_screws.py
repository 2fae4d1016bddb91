import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rotate_via_matrix
from rollergrasp.screws import (
    UNIT_X,
    UNIT_Y,
    UNIT_Z,
    Frame,
    PureTranslation,
    Screw,
    Twist,
    UnitVec3,
    Vec3,
    point_velocity,
    rodrigues_rotate,
    screw_from_twist,
    twist_from_screw,
)

coords = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
angles = st.floats(min_value=-4 * math.pi, max_value=4 * math.pi)


def unit_vectors():
    return (
        st.tuples(coords, coords, coords)
        .map(lambda t: np.array(t))
        .filter(lambda a: np.linalg.norm(a) > 1e-3)
        .map(lambda a: UnitVec3.from_array(a / np.linalg.norm(a)))
    )


class TestVec3:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Vec3(float("nan"), 0.0, 0.0)
        with pytest.raises(ValueError):
            Vec3(0.0, float("inf"), 0.0)

    def test_algebra(self):
        a = Vec3(1.0, 2.0, 3.0)
        b = Vec3(-1.0, 0.5, 2.0)
        assert (a + b).as_array() == pytest.approx([0.0, 2.5, 5.0])
        assert (a - b).as_array() == pytest.approx([2.0, 1.5, 1.0])
        assert (2.0 * a).as_array() == pytest.approx([2.0, 4.0, 6.0])
        assert a.dot(b) == pytest.approx(-1.0 + 1.0 + 6.0)
        assert a.cross(b).as_array() == pytest.approx([2.5, -5.0, 2.5])

    def test_unit_constructor_gate(self):
        v = UnitVec3(1.0 + 5e-7, 0.0, 0.0)
        assert v.norm() == pytest.approx(1.0, abs=1e-12)
        with pytest.raises(ValueError):
            UnitVec3(1.1, 0.0, 0.0)

    def test_normalized_zero_vector(self):
        with pytest.raises(ValueError):
            Vec3(0.0, 0.0, 0.0).normalized()


class TestRodrigues:
    def test_zero_angle_is_identity(self):
        v = Vec3(0.3, -1.2, 2.0)
        out = rodrigues_rotate(UnitVec3(0.0, 1.0, 0.0), 0.0, v)
        assert out.as_array() == pytest.approx(v.as_array())

    def test_quarter_turn_about_z(self):
        out = rodrigues_rotate(UNIT_Z, math.pi / 2, Vec3(1.0, 0.0, 0.0))
        assert out.as_array() == pytest.approx([0.0, 1.0, 0.0], abs=1e-15)

    def test_eighth_turn_about_y(self):
        out = rodrigues_rotate(UNIT_Y, math.pi / 4, Vec3(0.0, 0.0, 1.0))
        # expected frozen from explicit rotation-matrix evaluation
        expected = rotate_via_matrix((0.0, 1.0, 0.0), math.pi / 4, (0.0, 0.0, 1.0))
        assert expected == pytest.approx([0.7071067811865476, 0.0, 0.7071067811865476])
        assert out.as_array() == pytest.approx(expected, abs=1e-15)

    @given(axis=unit_vectors(), angle=angles, v=st.tuples(coords, coords, coords))
    @settings(max_examples=200, deadline=None)
    def test_norm_preserved(self, axis, angle, v):
        vec = Vec3(*v)
        out = rodrigues_rotate(axis, angle, vec)
        assert abs(out.norm() - vec.norm()) <= 1e-12 * max(1.0, vec.norm())

    @given(axis=unit_vectors(), angle=angles, v=st.tuples(coords, coords, coords))
    @settings(max_examples=200, deadline=None)
    def test_inverse_rotation_round_trips(self, axis, angle, v):
        vec = Vec3(*v)
        back = rodrigues_rotate(axis, -angle, rodrigues_rotate(axis, angle, vec))
        assert np.allclose(back.as_array(), vec.as_array(), atol=1e-12 * max(1.0, vec.norm()))

    @given(axis=unit_vectors(), angle=angles, v=st.tuples(coords, coords, coords))
    @settings(max_examples=100, deadline=None)
    def test_matches_matrix_oracle(self, axis, angle, v):
        out = rodrigues_rotate(axis, angle, Vec3(*v))
        expected = rotate_via_matrix(tuple(axis.as_array()), angle, v)
        assert np.allclose(out.as_array(), expected, atol=1e-9 * max(1.0, Vec3(*v).norm()))


class TestPointVelocity:
    def test_pure_translation_is_uniform(self):
        t = Twist(Vec3(0, 0, 0), Vec3(1.0, 0.0, 0.0), Frame.EE)
        for p in (Vec3(0, 0, 0), Vec3(1, 2, 3), Vec3(-0.5, 0.1, 9)):
            assert point_velocity(t, p).as_array() == pytest.approx([1.0, 0.0, 0.0])

    def test_unit_rotation_about_z(self):
        t = Twist(Vec3(0, 0, 1.0), Vec3(0, 0, 0), Frame.EE)
        out = point_velocity(t, Vec3(1.0, 0.0, 0.0))
        assert out.as_array() == pytest.approx([0.0, 1.0, 0.0])

    def test_screw_velocity_expansion(self):
        t = Twist(Vec3(0, 0, 1.0), Vec3(0, 0, 0.04), Frame.EE)
        out = point_velocity(t, Vec3(0.0, 0.04, 0.0))
        assert out.as_array() == pytest.approx([-0.04, 0.0, 0.04])


class TestTwistFrames:
    def test_mixed_frame_arithmetic_rejected(self):
        a = Twist(Vec3(0, 0, 1), Vec3(0, 0, 0), Frame.EE)
        b = Twist(Vec3(0, 0, 1), Vec3(0, 0, 0), Frame.WORLD)
        with pytest.raises(ValueError, match="mixed-frame"):
            _ = a + b

    def test_retag_then_add(self):
        a = Twist(Vec3(0, 0, 1), Vec3(0, 0, 0), Frame.EE)
        b = Twist(Vec3(0, 0, 0), Vec3(1, 0, 0), Frame.WORLD)
        total = a.with_frame(Frame.WORLD) + b
        assert total.frame is Frame.WORLD
        assert total.as_array() == pytest.approx([0, 0, 1, 1, 0, 0])


class TestScrewConversions:
    def test_zero_pitch_screw_through_origin(self):
        s = Screw(Vec3(0, 0, 0), UNIT_Z, 0.0)
        t = twist_from_screw(s, 1.0)
        assert t.as_array() == pytest.approx([0, 0, 1, 0, 0, 0])

    def test_pure_translation(self):
        t = twist_from_screw(PureTranslation(UnitVec3(-1.0, 0.0, 0.0)), 2.0)
        assert t.as_array() == pytest.approx([0, 0, 0, -2.0, 0, 0])

    def test_pitched_screw(self):
        s = Screw(Vec3(0, 0, 0), UNIT_Z, 0.04)
        t = twist_from_screw(s, 1.0)
        assert t.as_array() == pytest.approx([0, 0, 1, 0, 0, 0.04])

    def test_axis_point_velocity_is_pitch_along_axis(self):
        s = Screw(Vec3(0.02, -0.01, 0.3), UnitVec3.from_array(np.array([1.0, 2.0, -1.0]) / math.sqrt(6)), -0.7)
        for mag in (1.0, -2.5):
            t = twist_from_screw(s, mag)
            v = point_velocity(t, s.axis_point)
            assert np.allclose(v.as_array(), mag * s.pitch * s.axis_dir.as_array(), atol=1e-12)

    def test_factor_pitched_twist(self):
        t = Twist(Vec3(0, 0, 2.0), Vec3(0, 0, 0.08), Frame.EE)
        s = screw_from_twist(t)
        assert isinstance(s, Screw)
        assert s.axis_dir.as_array() == pytest.approx([0, 0, 1])
        assert s.pitch == pytest.approx(0.04)
        assert s.axis_point.as_array() == pytest.approx([0, 0, 0])

    def test_factor_translation(self):
        s = screw_from_twist(Twist(Vec3(0, 0, 0), Vec3(0, -3.0, 0), Frame.EE))
        assert isinstance(s, PureTranslation)
        assert s.direction.as_array() == pytest.approx([0, -1.0, 0])

    def test_factor_offset_axis(self):
        s = screw_from_twist(Twist(Vec3(0, 0, 1.0), Vec3(0, 1.0, 0), Frame.EE))
        assert isinstance(s, Screw)
        assert s.axis_point.as_array() == pytest.approx([-1.0, 0, 0])
        assert s.pitch == pytest.approx(0.0)

    def test_degenerate_twist_rejected(self):
        with pytest.raises(ValueError, match="degenerate twist"):
            screw_from_twist(Twist(Vec3(0, 0, 0), Vec3(0, 0, 0), Frame.EE))

    @given(
        w=st.tuples(coords, coords, coords).filter(lambda t: np.linalg.norm(t) > 1e-3),
        v=st.tuples(coords, coords, coords),
    )
    @settings(max_examples=200, deadline=None)
    def test_round_trip_up_to_axis_gauge(self, w, v):
        t = Twist(Vec3(*w), Vec3(*v), Frame.EE)
        s = screw_from_twist(t)
        assert isinstance(s, Screw)
        back = twist_from_screw(s, t.angular.norm())
        # equality up to the axis-point gauge: compare point velocities at two probes
        for p in (Vec3(0, 0, 0), Vec3(0.37, -1.4, 2.2)):
            va = point_velocity(t, p).as_array()
            vb = point_velocity(back, p).as_array()
            assert np.allclose(va, vb, rtol=1e-9, atol=1e-9 * max(1.0, t.norm()))

    @given(
        w=st.tuples(coords, coords, coords).filter(lambda t: np.linalg.norm(t) > 1e-3),
        v=st.tuples(coords, coords, coords),
    )
    @settings(max_examples=200, deadline=None)
    def test_velocity_constant_along_recovered_axis(self, w, v):
        t = Twist(Vec3(*w), Vec3(*v), Frame.EE)
        s = screw_from_twist(t)
        assert isinstance(s, Screw)
        wn = t.angular.norm()
        v0 = point_velocity(t, s.axis_point)
        scale = max(1.0, t.norm())
        for lam in (-2.0, 0.5, 3.3):
            p = s.axis_point + lam * s.axis_dir
            vp = point_velocity(t, p)
            assert np.allclose(vp.as_array(), v0.as_array(), atol=1e-9 * scale)
        assert v0.dot(s.axis_dir) == pytest.approx(s.pitch * wn, rel=1e-9, abs=1e-12 * scale)
