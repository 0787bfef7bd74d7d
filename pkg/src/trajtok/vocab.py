"""Vocabulary containers shared by both tokenizers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .core import AgentType, Trajectory
from .errors import DegenerateGrid, IndexOutOfRange

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid over token endpoints.

    Rows ``i`` run along y and columns ``j`` along x, so a map has shape
    ``(H, W)``. Cells are half-open: ``[edge, edge + interval)``.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    x_interval: float
    y_interval: float
    H: int = field(init=False)
    W: int = field(init=False)

    def __post_init__(self) -> None:
        for name in ("x_min", "x_max", "y_min", "y_max", "x_interval", "y_interval"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DegenerateGrid(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if not self.x_min < self.x_max or not self.y_min < self.y_max:
            raise DegenerateGrid("grid range is empty or inverted")
        if self.x_interval <= 0 or self.y_interval <= 0:
            raise DegenerateGrid("grid intervals must be positive")
        W = (self.x_max - self.x_min) / self.x_interval
        H = (self.y_max - self.y_min) / self.y_interval
        for n, raw in (("x", W), ("y", H)):
            if abs(raw - round(raw)) > _GRID_TOL:
                raise DegenerateGrid(f"{n} range is not an integer multiple of its interval ({raw!r} cells)")
        object.__setattr__(self, "W", int(round(W)))
        object.__setattr__(self, "H", int(round(H)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.H, self.W)

    @property
    def n_cells(self) -> int:
        return self.H * self.W

    @property
    def y_symmetric(self) -> bool:
        return self.y_min == -self.y_max

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.x_min + (j + 0.5) * self.x_interval, self.y_min + (i + 0.5) * self.y_interval)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x < self.x_max and self.y_min <= y < self.y_max

    def as_dict(self) -> dict[str, float]:
        return {
            "x_min": self.x_min, "x_max": self.x_max, "x_interval": self.x_interval,
            "y_min": self.y_min, "y_max": self.y_max, "y_interval": self.y_interval,
        }


def make_grid_spec(x_min, x_max, x_interval, y_min, y_max, y_interval) -> GridSpec:
    return GridSpec(x_min, x_max, y_min, y_max, x_interval, y_interval)


class TokenSource(enum.Enum):
    MEAN = "mean"
    INTERPOLATED = "interp"
    SAMPLED = "sampled"  # k-disks: a verbatim dataset trajectory


@dataclass(frozen=True, eq=False)
class TrajToken:
    id: int
    trajectory: Trajectory
    cell: tuple[int, int] | None
    source: TokenSource

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrajToken):
            return NotImplemented
        return (self.id == other.id and self.cell == other.cell and self.source is other.source
                and self.trajectory == other.trajectory)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """Ordered trajectory tokens plus the grid and parameters that built them.

    ``build_params`` always carries ``tokenizer`` and ``L``; the remaining keys
    depend on the tokenizer. ``report`` holds integer build statistics.
    """

    agent_type: AgentType
    grid: GridSpec
    tokens: tuple[TrajToken, ...]
    build_params: dict[str, Any]
    report: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for n, tok in enumerate(self.tokens):
            if tok.id != n:
                raise ValueError(f"token ids must be 0..|V|-1 in order; position {n} has id {tok.id}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, i: int) -> TrajToken:
        if not 0 <= i < len(self.tokens):
            raise IndexOutOfRange(f"token id {i} outside [0, {len(self.tokens)})")
        return self.tokens[i]

    @property
    def length(self) -> int:
        return int(self.build_params.get("L", len(self.tokens[0].trajectory) if self.tokens else 0))

    @cached_property
    def points(self) -> np.ndarray:
        """All token poses as a read-only ``(|V|, L, 3)`` array."""
        if not self.tokens:
            arr = np.zeros((0, self.length, 3))
        else:
            arr = np.stack([t.trajectory.points for t in self.tokens])
        arr.setflags(write=False)
        return arr

    @property
    def endpoints(self) -> np.ndarray:
        return self.points[:, -1, :]

    def cells(self) -> list[tuple[int, int] | None]:
        return [t.cell for t in self.tokens]

    def source_counts(self) -> dict[str, int]:
        out = {s.value: 0 for s in TokenSource}
        for t in self.tokens:
            out[t.source.value] += 1
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (self.agent_type is other.agent_type and self.grid == other.grid
                and self.build_params == other.build_params and self.report == other.report
                and self.tokens == other.tokens)

    __hash__ = None  # type: ignore[assignment]


def make_vocabulary(agent_type, grid: GridSpec, trajectories: Sequence[np.ndarray],
                    cells: Sequence[tuple[int, int] | None], sources: Sequence[TokenSource],
                    build_params: dict[str, Any], report: dict[str, int] | None = None) -> Vocabulary:
    agent_type = AgentType.parse(agent_type)
    tokens = tuple(
        TrajToken(n, Trajectory(p, agent_type), c, s)
        for n, (p, c, s) in enumerate(zip(trajectories, cells, sources))
    )
    return Vocabulary(agent_type, grid, tokens, dict(build_params), dict(report or {}))
