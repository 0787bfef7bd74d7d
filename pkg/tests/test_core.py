import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trajtok import (
    AgentState,
    AgentType,
    NormalizedDataset,
    Pose,
    Trajectory,
    apply_token_global,
    flip_augment,
    flip_trajectory,
    normalize_to_agent_frame,
    wrap_angle,
)
from trajtok.errors import AlreadyAugmented, LengthMismatch, NonFinite

finite = st.floats(-1e3, 1e3, allow_nan=False)
angle = st.floats(-10.0, 10.0, allow_nan=False)


def traj_strategy(L=5):
    return st.lists(st.tuples(finite, finite, angle), min_size=L, max_size=L).map(
        lambda rows: Trajectory(np.array(rows)))


def yaw_close(a, b, tol):
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi
    return np.all(np.abs(d) <= tol)


class TestWrap:
    @pytest.mark.parametrize("a, expected", [
        (0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi, math.pi),
        (2 * math.pi, 0.0), (-0.5, -0.5),
    ])
    def test_values(self, a, expected):
        assert wrap_angle(a) == pytest.approx(expected, abs=1e-12)

    @given(angle)
    def test_range(self, a):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert yaw_close(w, a, 1e-9)

    def test_in_range_values_untouched(self):
        a = np.array([-3.0, -0.2, 0.0, 1.7, math.pi])
        assert np.array_equal(wrap_angle(a), a)

    def test_pose_wraps(self):
        assert Pose(0, 0, -math.pi).yaw == math.pi


class TestNormalize:
    def test_stationary(self):
        t = normalize_to_agent_frame([(3, 4, 0.7)] * 6)
        assert np.allclose(t.points, 0.0, atol=1e-15)

    def test_identity_frame(self):
        states = [(0, 0, 0)] + [(0.1 * i, 0, 0) for i in range(1, 6)]
        t = normalize_to_agent_frame(states)
        assert np.allclose(t.points, [(0.1 * i, 0, 0) for i in range(1, 6)], atol=1e-15)

    def test_quarter_turn(self):
        states = [(2, 3, math.pi / 2), (2, 4, math.pi / 2)] + [(2, 4, math.pi / 2)] * 4
        t = normalize_to_agent_frame(states)
        assert t.points[0] == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            normalize_to_agent_frame([(0, 0, 0)] * 5)

    def test_non_finite(self):
        states = [(0, 0, 0)] * 5 + [(float("nan"), 0, 0)]
        with pytest.raises(NonFinite):
            normalize_to_agent_frame(states)
        with pytest.raises(NonFinite):
            normalize_to_agent_frame([(0, 0, 0)] * 5 + [(math.inf, 0, 0)])

    def test_agent_type_kept(self):
        t = normalize_to_agent_frame([(0, 0, 0)] * 6, AgentType.PEDESTRIAN)
        assert t.agent_type is AgentType.PEDESTRIAN


class TestApplyGlobal:
    def test_identity(self):
        out = apply_token_global(AgentState(Pose(0, 0, 0)), Trajectory([(1, 0, 0)] * 5))
        assert out[0].as_tuple() == pytest.approx((1, 0, 0))

    def test_quarter_turn(self):
        out = apply_token_global(AgentState(Pose(2, 3, math.pi / 2)), Trajectory([(1, 0, 0)] * 5))
        assert out[0].as_tuple() == pytest.approx((2, 4, math.pi / 2), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            apply_token_global(Pose(0, 0, 0), Trajectory([(1, 0, 0)] * 4), length=5)

    @settings(max_examples=200)
    @given(finite, finite, angle, traj_strategy())
    def test_round_trip(self, ax, ay, ayaw, token):
        anchor = Pose(ax, ay, ayaw)
        rolled = apply_token_global(anchor, token)
        back = normalize_to_agent_frame([anchor] + rolled)
        assert np.allclose(back.points[:, :2], token.points[:, :2], atol=1e-9, rtol=0)
        assert yaw_close(back.points[:, 2], token.points[:, 2], 1e-9)
        assert np.all((back.points[:, 2] > -math.pi) & (back.points[:, 2] <= math.pi))


class TestFlip:
    def test_reflection(self):
        t = Trajectory([(1, 0.5, 0.2)] * 5)
        assert np.allclose(flip_trajectory(t).points, [(1, -0.5, -0.2)] * 5)

    def test_straight_fixed_point(self):
        t = Trajectory([(0.2 * i, 0, 0) for i in range(1, 6)])
        assert np.allclose(flip_trajectory(t).points, t.points)

    def test_yaw_pi_fixed(self):
        t = Trajectory([(1, 1, math.pi)] * 5)
        assert np.all(flip_trajectory(t).points[:, 2] == math.pi)

    def test_agent_type_preserved(self):
        t = Trajectory([(1, 1, 0)] * 5, AgentType.CYCLIST)
        assert flip_trajectory(t).agent_type is AgentType.CYCLIST

    @given(traj_strategy())
    def test_involution(self, t):
        assert flip_trajectory(flip_trajectory(t)) == t


class TestFlipAugment:
    def _ds(self, n):
        rng = np.random.default_rng(n)
        return NormalizedDataset.from_array(rng.normal(size=(n, 5, 3)))

    def test_doubles(self):
        out = flip_augment(self._ds(3))
        assert len(out) == 6 and out.flip_applied
        assert np.array_equal(out.points[:3], self._ds(3).points)
        for a, b in zip(out.points[:3], out.points[3:]):
            assert flip_trajectory(Trajectory(a)) == Trajectory(b)

    def test_empty(self):
        out = flip_augment(NormalizedDataset.empty())
        assert len(out) == 0 and out.flip_applied

    def test_duplicates_kept(self):
        d = flip_augment(self._ds(4))
        again = flip_augment(NormalizedDataset(d.points, d.agent_types))
        assert len(again) == 16

    def test_already_augmented(self):
        with pytest.raises(AlreadyAugmented):
            flip_augment(flip_augment(self._ds(2)))

    def test_closure(self):
        d = flip_augment(self._ds(20))
        rows = {tuple(p.reshape(-1)) for p in d.points}
        for p in d.points:
            assert tuple(flip_trajectory(Trajectory(p)).points.reshape(-1)) in rows


def test_trajectory_is_immutable():
    t = Trajectory([(1, 0, 0)] * 5)
    with pytest.raises(ValueError):
        t.points[0, 0] = 3.0


def test_trajectory_rejects_bad_shapes():
    with pytest.raises(LengthMismatch):
        Trajectory(np.zeros((5, 2)))
    with pytest.raises(NonFinite):
        Trajectory([(float("nan"), 0, 0)] * 5)
