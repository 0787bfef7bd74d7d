"""Geometric primitives: poses, trajectories, agent-frame changes and flips.

Everything here works in the agent-centric frame: origin and zero heading at
the agent pose where a prediction interval starts. A trajectory holds the
``L`` poses that follow that anchor; the anchor itself is implicit.

Arrays of shape ``(..., L, 3)`` with columns ``(x, y, yaw)`` are the bulk
representation; :class:`Trajectory` wraps a single ``(L, 3)`` block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AlreadyAugmented, LengthMismatch, NonFinite

TOKEN_LENGTH = 5
"""Poses per token: 0.5 s at 10 Hz."""

STEP_SECONDS = 0.1


class AgentType(enum.Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    CYCLIST = "cyclist"

    @classmethod
    def parse(cls, text: str | AgentType) -> AgentType:
        if isinstance(text, AgentType):
            return text
        key = str(text).strip().lower()
        aliases = {"bicycle": "cyclist", "veh": "vehicle", "ped": "pedestrian", "cyc": "cyclist"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown agent type {text!r}") from None

    def __str__(self) -> str:
        return self.value


def wrap_angle(a):
    """Wrap angles into (-pi, pi].

    Values already in range are returned untouched so that negation stays an
    exact involution. Works on floats and numpy arrays.
    """
    if np.ndim(a) == 0:
        a = float(a)
        if -math.pi < a <= math.pi:
            return a
        return math.pi - (math.pi - a) % (2.0 * math.pi)
    a = np.asarray(a, dtype=float)
    out = a.copy()
    bad = ~((a > -np.pi) & (a <= np.pi))
    if bad.any():
        out[bad] = np.pi - np.mod(np.pi - a[bad], 2.0 * np.pi)
    return out


@dataclass(frozen=True, slots=True)
class Pose:
    x: float
    y: float
    yaw: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.yaw)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.yaw)


@dataclass(frozen=True, slots=True)
class AgentState:
    pose: Pose
    agent_type: AgentType = AgentType.VEHICLE

    def __post_init__(self) -> None:
        if not self.pose.is_finite():
            raise NonFinite(f"agent state has non-finite pose {self.pose}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    """``L`` agent-frame poses. ``points`` is a read-only ``(L, 3)`` array."""

    points: np.ndarray
    agent_type: AgentType = AgentType.VEHICLE

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise LengthMismatch(f"trajectory points must have shape (L, 3), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise NonFinite("trajectory contains non-finite coordinates")
        pts[:, 2] = wrap_angle(pts[:, 2])
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "agent_type", AgentType.parse(self.agent_type))

    @classmethod
    def from_poses(cls, poses: Iterable[Pose | Sequence[float]], agent_type=AgentType.VEHICLE) -> Trajectory:
        rows = [p.as_tuple() if isinstance(p, Pose) else tuple(p) for p in poses]
        return cls(np.array(rows, dtype=float).reshape(-1, 3), agent_type)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def poses(self) -> list[Pose]:
        return [Pose(*row) for row in self.points]

    @property
    def endpoint(self) -> Pose:
        return Pose(*self.points[-1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.agent_type == other.agent_type and np.array_equal(self.points, other.points)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        end = self.points[-1]
        return f"Trajectory(L={len(self)}, end=({end[0]:.3f}, {end[1]:.3f}, {end[2]:.3f}), {self.agent_type})"


def _as_pose_array(poses) -> np.ndarray:
    rows = [p.as_tuple() if isinstance(p, Pose) else tuple(p) for p in poses]
    return np.array(rows, dtype=float).reshape(-1, 3)


def to_agent_frame(global_states: np.ndarray) -> np.ndarray:
    """Vectorized frame change for ``(N, L+1, 3)`` global poses -> ``(N, L, 3)``."""
    g = np.asarray(global_states, dtype=float)
    anchor = g[:, :1, :]
    dx = g[:, 1:, 0] - anchor[:, :, 0]
    dy = g[:, 1:, 1] - anchor[:, :, 1]
    c = np.cos(anchor[:, :, 2])
    s = np.sin(anchor[:, :, 2])
    out = np.empty(g[:, 1:, :].shape)
    out[..., 0] = c * dx + s * dy
    out[..., 1] = -s * dx + c * dy
    out[..., 2] = wrap_angle(g[:, 1:, 2] - anchor[:, :, 2])
    return out


def to_global_frame(anchors: np.ndarray, local: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_agent_frame`: ``(N, 3)`` anchors, ``(N, L, 3)`` tokens."""
    a = np.asarray(anchors, dtype=float)[:, None, :]
    p = np.asarray(local, dtype=float)
    c = np.cos(a[..., 2])
    s = np.sin(a[..., 2])
    out = np.empty(p.shape)
    out[..., 0] = a[..., 0] + c * p[..., 0] - s * p[..., 1]
    out[..., 1] = a[..., 1] + s * p[..., 0] + c * p[..., 1]
    out[..., 2] = wrap_angle(a[..., 2] + p[..., 2])
    return out


def normalize_to_agent_frame(global_states, agent_type=AgentType.VEHICLE, length: int = TOKEN_LENGTH) -> Trajectory:
    """Express the last ``length`` of ``length + 1`` global poses relative to the first."""
    g = _as_pose_array(global_states)
    if g.shape[0] != length + 1:
        raise LengthMismatch(f"expected {length + 1} global poses, got {g.shape[0]}")
    if not np.isfinite(g).all():
        raise NonFinite("global states contain non-finite coordinates")
    return Trajectory(to_agent_frame(g[None])[0], agent_type)


def apply_token_global(anchor: AgentState | Pose, token: Trajectory, length: int | None = None) -> list[Pose]:
    """Roll a token out from ``anchor`` into global poses."""
    pose = anchor.pose if isinstance(anchor, AgentState) else anchor
    if length is not None and len(token) != length:
        raise LengthMismatch(f"token has {len(token)} points, expected {length}")
    out = to_global_frame(np.array([pose.as_tuple()]), token.points[None])[0]
    return [Pose(*row) for row in out]


def flip_points(points: np.ndarray) -> np.ndarray:
    """Reflect ``(..., 3)`` poses about the x-axis."""
    out = np.array(points, dtype=float, copy=True)
    out[..., 1] = -out[..., 1]
    out[..., 2] = wrap_angle(-out[..., 2])
    return out


def flip_trajectory(t: Trajectory) -> Trajectory:
    return Trajectory(flip_points(t.points), t.agent_type)


@dataclass(frozen=True, eq=False)
class NormalizedDataset:
    """Agent-frame trajectories stored as one ``(N, L, 3)`` array.

    ``agent_types`` is an object array of :class:`AgentType` aligned with
    ``points``. ``drop_count`` carries records rejected upstream.
    """

    points: np.ndarray
    agent_types: np.ndarray
    drop_count: int = 0
    flip_applied: bool = False
    length: int = field(init=False)

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise LengthMismatch(f"dataset points must have shape (N, L, 3), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise NonFinite("dataset contains non-finite coordinates")
        types = np.empty(pts.shape[0], dtype=object)
        src = np.asarray(self.agent_types, dtype=object).reshape(-1)
        if src.shape[0] == 1 and pts.shape[0] != 1:
            src = np.repeat(src, pts.shape[0])
        if src.shape[0] != pts.shape[0]:
            raise LengthMismatch("agent_types must align with points")
        types[:] = [AgentType.parse(t) for t in src]
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "agent_types", _frozen(types))
        object.__setattr__(self, "length", pts.shape[1])

    @classmethod
    def empty(cls, length: int = TOKEN_LENGTH) -> NormalizedDataset:
        return cls(np.zeros((0, length, 3)), np.zeros(0, dtype=object))

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[Trajectory], drop_count: int = 0,
                          flip_applied: bool = False, length: int = TOKEN_LENGTH) -> NormalizedDataset:
        if not trajectories:
            ds = cls.empty(length)
            return cls(ds.points, ds.agent_types, drop_count, flip_applied)
        lengths = {len(t) for t in trajectories}
        if len(lengths) != 1:
            raise LengthMismatch(f"trajectories have mixed lengths {sorted(lengths)}")
        pts = np.stack([t.points for t in trajectories])
        return cls(pts, np.array([t.agent_type for t in trajectories], dtype=object), drop_count, flip_applied)

    @classmethod
    def from_array(cls, points: np.ndarray, agent_type=AgentType.VEHICLE, **kwargs) -> NormalizedDataset:
        points = np.asarray(points, dtype=float)
        return cls(points, np.full(points.shape[0], AgentType.parse(agent_type), dtype=object), **kwargs)

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i: int) -> Trajectory:
        return Trajectory(self.points[i], self.agent_types[i])

    def __iter__(self) -> Iterator[Trajectory]:
        for i in range(len(self)):
            yield self[i]

    @property
    def trajectories(self) -> list[Trajectory]:
        return list(self)

    @property
    def endpoints(self) -> np.ndarray:
        return self.points[:, -1, :]

    def of_type(self, agent_type) -> NormalizedDataset:
        agent_type = AgentType.parse(agent_type)
        mask = np.array([t is agent_type for t in self.agent_types], dtype=bool)
        return NormalizedDataset(self.points[mask], self.agent_types[mask], self.drop_count, self.flip_applied)

    def concat(self, other: NormalizedDataset) -> NormalizedDataset:
        """Append ``other``; the result is no longer guaranteed flip-closed."""
        if len(other) and len(self) and other.length != self.length:
            raise LengthMismatch("cannot concatenate datasets with different L")
        pts = np.concatenate([self.points, other.points]) if len(other) else self.points
        types = np.concatenate([self.agent_types, other.agent_types]) if len(other) else self.agent_types
        return NormalizedDataset(pts, types, self.drop_count + other.drop_count,
                                 self.flip_applied and not len(other))


def flip_augment(d: NormalizedDataset) -> NormalizedDataset:
    """Concatenate ``d`` with its x-axis reflection. Duplicates are kept."""
    if d.flip_applied:
        raise AlreadyAugmented("dataset was already flip-augmented")
    pts = np.concatenate([d.points, flip_points(d.points)])
    types = np.concatenate([d.agent_types, d.agent_types])
    return NormalizedDataset(pts, types, d.drop_count, True)
