"""Synthetic motion data from kinematic bicycle rollouts.

Stand-in for real driving logs: each record is an anchor pose plus ``L``
future poses at 10 Hz in a random global frame. Steering is capped so the
lateral acceleration stays plausible for the agent type, which keeps the
endpoint cloud compact and roughly mirror-symmetric about the x-axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import STEP_SECONDS, TOKEN_LENGTH, AgentType, NormalizedDataset, to_global_frame, wrap_angle
from .grid import DEFAULT_GRIDS
from .io import DatasetRecords


@dataclass(frozen=True)
class KinematicProfile:
    wheelbase: float  # m
    rear_axle: float  # distance from rear axle to reference point, m
    speed: tuple[float, float]  # m/s
    accel: tuple[float, float]  # m/s^2
    max_steer: float  # rad
    steer_rate: float  # rad/s
    max_lateral_accel: float  # m/s^2


PROFILES = {
    AgentType.VEHICLE: KinematicProfile(2.8, 1.4, (0.5, 20.0), (-4.0, 3.0), 0.55, 0.5, 4.0),
    AgentType.CYCLIST: KinematicProfile(1.1, 0.55, (0.3, 8.0), (-2.0, 1.5), 0.6, 0.8, 3.0),
    AgentType.PEDESTRIAN: KinematicProfile(0.5, 0.25, (0.1, 2.5), (-1.0, 1.0), 0.9, 1.5, 2.0),
}


def max_reach(agent_type, length: int = TOKEN_LENGTH, dt: float = STEP_SECONDS) -> float:
    """Upper bound on endpoint distance from the anchor for a kinematic rollout."""
    p = PROFILES[AgentType.parse(agent_type)]
    horizon = length * dt
    return (p.speed[1] + max(p.accel[1], 0.0) * horizon) * horizon


def _steer_limit(p: KinematicProfile, v: np.ndarray) -> np.ndarray:
    return np.minimum(p.max_steer, np.arctan(p.wheelbase * p.max_lateral_accel / np.maximum(v * v, 1e-9)))


def bicycle_rollout(n: int, agent_type, rng: np.random.Generator, length: int = TOKEN_LENGTH,
                    dt: float = STEP_SECONDS) -> np.ndarray:
    """``(n, L+1, 3)`` poses in the agent frame, starting at the origin."""
    p = PROFILES[AgentType.parse(agent_type)]
    v = rng.uniform(*p.speed, size=n)
    a = rng.uniform(*p.accel, size=n)
    lim = _steer_limit(p, v)
    delta = rng.uniform(-1.0, 1.0, size=n) * lim
    rate = rng.uniform(-p.steer_rate, p.steer_rate, size=n)
    out = np.zeros((n, length + 1, 3))
    x = np.zeros(n)
    y = np.zeros(n)
    yaw = np.zeros(n)
    for step in range(1, length + 1):
        beta = np.arctan(p.rear_axle / p.wheelbase * np.tan(delta))
        x = x + v * np.cos(yaw + beta) * dt
        y = y + v * np.sin(yaw + beta) * dt
        yaw = yaw + v / p.rear_axle * np.sin(beta) * dt
        v = np.maximum(v + a * dt, 0.0)
        lim = _steer_limit(p, v)
        delta = np.clip(delta + rate * dt, -lim, lim)
        out[:, step, 0] = x
        out[:, step, 1] = y
        out[:, step, 2] = wrap_angle(yaw)
    return out


def far_field_rollout(n: int, agent_type, rng: np.random.Generator, length: int = TOKEN_LENGTH) -> np.ndarray:
    """Straight-line jumps to endpoints drawn uniformly over the agent type's grid range."""
    x_min, x_max, _, y_min, y_max, _ = DEFAULT_GRIDS[AgentType.parse(agent_type)]
    ex = rng.uniform(x_min, x_max, size=n)
    ey = rng.uniform(y_min, y_max, size=n)
    frac = np.arange(length + 1) / length
    out = np.zeros((n, length + 1, 3))
    out[:, :, 0] = frac[None, :] * ex[:, None]
    out[:, :, 1] = frac[None, :] * ey[:, None]
    out[:, 1:, 2] = np.arctan2(ey, ex)[:, None]
    return out


def gen_synthetic(n: int, agent_type=AgentType.VEHICLE, seed: int = 0, noise_fraction: float = 0.0,
                  length: int = TOKEN_LENGTH, world_extent: float = 100.0) -> DatasetRecords:
    """``n`` bicycle rollouts plus ``round(noise_fraction * n)`` far-field records.

    Every record is placed at a random global anchor. Same seed, same output.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if noise_fraction < 0:
        raise ValueError("noise_fraction must be non-negative")
    agent_type = AgentType.parse(agent_type)
    rng = np.random.default_rng(seed)
    local = bicycle_rollout(n, agent_type, rng, length)
    n_noise = int(round(noise_fraction * n))
    if n_noise:
        local = np.concatenate([local, far_field_rollout(n_noise, agent_type, rng, length)])
    total = local.shape[0]
    anchors = np.column_stack([
        rng.uniform(-world_extent, world_extent, size=total),
        rng.uniform(-world_extent, world_extent, size=total),
        rng.uniform(-np.pi, np.pi, size=total),
    ])
    states = np.empty_like(local)
    states[:, 0, :] = anchors
    states[:, 0, 2] = wrap_angle(anchors[:, 2])
    states[:, 1:, :] = to_global_frame(anchors, local[:, 1:, :])
    ids = [f"syn{r:06d}" for r in range(n)] + [f"noise{r:06d}" for r in range(n_noise)]
    return DatasetRecords([agent_type] * total, ids, states, [])


def synthetic_dataset(n: int, agent_type=AgentType.VEHICLE, seed: int = 0, noise_fraction: float = 0.0,
                      length: int = TOKEN_LENGTH) -> NormalizedDataset:
    """Agent-frame trajectories straight from the rollout, skipping the global round trip."""
    agent_type = AgentType.parse(agent_type)
    rng = np.random.default_rng(seed)
    local = bicycle_rollout(n, agent_type, rng, length)
    n_noise = int(round(noise_fraction * n))
    if n_noise:
        local = np.concatenate([local, far_field_rollout(n_noise, agent_type, rng, length)])
    return NormalizedDataset.from_array(local[:, 1:, :], agent_type)
