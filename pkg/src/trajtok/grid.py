"""TrajTok vocabulary builder.

Pipeline: bin every trajectory endpoint into a grid cell, mark occupied
cells, count occupied neighbours in a ``k x k`` window, then keep occupied
cells with enough support (filter) and add empty cells with dense
surroundings (expand). Each valid cell yields one token: the mean of its
trajectories, or a Hermite curve to the cell center for expanded cells.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import AgentType, NormalizedDataset, Pose, Trajectory, TOKEN_LENGTH
from .errors import (
    BadThresholds,
    DegenerateEndpointWarning,
    EmptyCell,
    EmptyDataset,
    NotAugmentedWarning,
)
from .vocab import GridSpec, TokenSource, Vocabulary, make_grid_spec, make_vocabulary

__all__ = [
    "CellClassification",
    "CellGroups",
    "OccupancyMap",
    "Provenance",
    "DEFAULT_GRIDS",
    "DEFAULT_K",
    "DEFAULT_TAU_FILTER",
    "DEFAULT_TAU_EXPAND",
    "bin_endpoint",
    "bin_endpoints",
    "build_occupancy",
    "build_vocabulary",
    "full_grid_vocabulary",
    "classify_cells",
    "estimate_cell_yaw",
    "interp_token",
    "make_grid_spec",
    "mean_token",
    "window_count",
]

DEFAULT_K = 5
DEFAULT_TAU_FILTER = 3
DEFAULT_TAU_EXPAND = 13

# x_min, x_max, x_interval, y_min, y_max, y_interval (meters)
DEFAULT_GRIDS: dict[AgentType, tuple[float, ...]] = {
    AgentType.VEHICLE: (-5.0, 20.0, 0.1, -1.5, 4.5, 0.05),
    AgentType.CYCLIST: (-1.0, 8.0, 0.05, -1.0, 1.0, 0.05),
    AgentType.PEDESTRIAN: (-1.5, 4.5, 0.05, -2.0, 2.0, 0.05),
}


def default_grid(agent_type) -> GridSpec:
    return make_grid_spec(*DEFAULT_GRIDS[AgentType.parse(agent_type)])


class Provenance(enum.IntEnum):
    EMPTY = 0
    DATA_KEPT = 1
    DATA_FILTERED = 2
    EXPANDED = 3


def bin_endpoints(grid: GridSpec, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized binning. Returns ``(i, j, inside)``; indices are only meaningful where ``inside``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inside = (x >= grid.x_min) & (x < grid.x_max) & (y >= grid.y_min) & (y < grid.y_max)
    j = np.floor((x - grid.x_min) / grid.x_interval)
    i = np.floor((y - grid.y_min) / grid.y_interval)
    # rounding can push a point just below the upper edge onto index W (or H)
    j = np.clip(np.where(inside, j, 0), 0, grid.W - 1).astype(np.int64)
    i = np.clip(np.where(inside, i, 0), 0, grid.H - 1).astype(np.int64)
    return i, j, inside


def bin_endpoint(grid: GridSpec, p: Pose | tuple[float, ...]) -> tuple[int, int] | None:
    x, y = (p.x, p.y) if isinstance(p, Pose) else (p[0], p[1])
    i, j, inside = bin_endpoints(grid, np.array([x]), np.array([y]))
    if not inside[0]:
        return None
    return int(i[0]), int(j[0])


def window_count(values: np.ndarray, k: int) -> np.ndarray:
    """Sum of ``values`` over the ``k x k`` window centered on each cell, clipped at borders."""
    kernel = np.ones((k, k), dtype=values.dtype)
    return ndimage.correlate(values, kernel, mode="constant", cval=0)


@dataclass(frozen=True, eq=False)
class CellGroups:
    """Trajectory indices per cell, CSR style: cell ``c`` owns ``order[start[c]:start[c + 1]]``."""

    order: np.ndarray
    start: np.ndarray
    W: int

    def indices(self, i: int, j: int) -> np.ndarray:
        c = i * self.W + j
        return self.order[self.start[c]:self.start[c + 1]]


@dataclass(frozen=True, eq=False)
class OccupancyMap:
    grid: GridSpec
    k: int
    occupied: np.ndarray
    count: np.ndarray
    neighborhood: np.ndarray
    endpoint_yaw: np.ndarray
    """Circular-mean endpoint yaw per occupied cell; NaN elsewhere."""
    groups: CellGroups
    n_input: int
    n_dropped: int


def _check_k(k: int) -> None:
    if int(k) != k or k < 1 or k % 2 == 0:
        raise BadThresholds(f"window size k must be a positive odd integer, got {k}")


def build_occupancy(grid: GridSpec, d: NormalizedDataset, k: int = DEFAULT_K) -> OccupancyMap:
    """Bin endpoints and compute the occupancy, count and neighbourhood maps."""
    _check_k(k)
    if not d.flip_applied:
        warnings.warn("building occupancy from a dataset that is not flip-augmented",
                      NotAugmentedWarning, stacklevel=2)
    ends = d.endpoints
    i, j, inside = bin_endpoints(grid, ends[:, 0], ends[:, 1])
    n_inside = int(inside.sum())
    if n_inside == 0:
        raise EmptyDataset("no trajectory endpoint falls inside the grid")
    flat = i * grid.W + j
    kept = np.flatnonzero(inside)
    order = kept[np.argsort(flat[kept], kind="stable")]
    count = np.bincount(flat[kept], minlength=grid.n_cells)
    start = np.concatenate([[0], np.cumsum(count)])

    yaw = ends[kept, 2]
    s = np.bincount(flat[kept], weights=np.sin(yaw), minlength=grid.n_cells)
    c = np.bincount(flat[kept], weights=np.cos(yaw), minlength=grid.n_cells)
    endpoint_yaw = np.where(count > 0, np.arctan2(s, c), np.nan)

    count = count.reshape(grid.shape)
    occupied = count > 0
    neighborhood = window_count(occupied.astype(np.int64), k)
    return OccupancyMap(
        grid=grid,
        k=int(k),
        occupied=occupied,
        count=count,
        neighborhood=neighborhood,
        endpoint_yaw=endpoint_yaw.reshape(grid.shape),
        groups=CellGroups(order, start, grid.W),
        n_input=len(d),
        n_dropped=len(d) - n_inside,
    )


@dataclass(frozen=True, eq=False)
class CellClassification:
    valid: np.ndarray
    provenance: np.ndarray  # Provenance codes, int array

    def counts(self) -> dict[str, int]:
        return {p.name.lower(): int((self.provenance == p).sum()) for p in Provenance}


def check_thresholds(k: int, tau_filter: int, tau_expand: int) -> None:
    _check_k(k)
    if int(tau_filter) != tau_filter or int(tau_expand) != tau_expand:
        raise BadThresholds("thresholds must be integers")
    # tau_expand above k*k - 1 is allowed and disables expansion
    if not 1 <= tau_filter <= tau_expand or tau_filter > k * k:
        raise BadThresholds(
            f"need 1 <= tau_filter <= tau_expand and tau_filter <= k*k; got "
            f"tau_filter={tau_filter}, tau_expand={tau_expand}, k={k}")


def classify_cells(m: OccupancyMap, tau_filter: int = DEFAULT_TAU_FILTER,
                   tau_expand: int = DEFAULT_TAU_EXPAND) -> CellClassification:
    """Single pass over the original occupancy; no iteration to a fixpoint."""
    check_thresholds(m.k, tau_filter, tau_expand)
    occ = m.occupied
    nb = m.neighborhood
    kept = occ & (nb >= tau_filter)
    filtered = occ & ~kept
    expanded = ~occ & (nb >= tau_expand)
    prov = np.full(occ.shape, Provenance.EMPTY, dtype=np.int8)
    prov[kept] = Provenance.DATA_KEPT
    prov[filtered] = Provenance.DATA_FILTERED
    prov[expanded] = Provenance.EXPANDED
    return CellClassification(valid=kept | expanded, provenance=prov)


def _circular_mean(yaw: np.ndarray, axis=0) -> np.ndarray:
    return np.arctan2(np.sin(yaw).mean(axis=axis), np.cos(yaw).mean(axis=axis))


def mean_token(cell_trajectories, agent_type=AgentType.VEHICLE) -> Trajectory:
    """Pointwise mean of a group; yaw uses the circular mean."""
    if isinstance(cell_trajectories, np.ndarray):
        group = np.asarray(cell_trajectories, dtype=float)
    else:
        items = list(cell_trajectories)
        if items and isinstance(items[0], Trajectory):
            agent_type = items[0].agent_type
            group = np.stack([t.points for t in items])
        else:
            group = np.asarray(items, dtype=float)
    if group.ndim != 3 or group.shape[0] == 0:
        raise EmptyCell("cannot average an empty cell")
    out = np.empty(group.shape[1:])
    out[:, :2] = group[:, :, :2].mean(axis=0)
    out[:, 2] = _circular_mean(group[:, :, 2])
    return Trajectory(out, agent_type)


def estimate_cell_yaw(m: OccupancyMap, cell: tuple[int, int], k: int | None = None) -> float:
    """Count-weighted circular mean of per-cell endpoint yaw over the occupied window cells."""
    k = m.k if k is None else k
    i, j = cell
    h = k // 2
    rows = slice(max(i - h, 0), min(i + h + 1, m.grid.H))
    cols = slice(max(j - h, 0), min(j + h + 1, m.grid.W))
    occ = m.occupied[rows, cols]
    if not occ.any():
        cx, cy = m.grid.cell_center(i, j)
        return float(math.atan2(cy, cx))
    w = m.count[rows, cols][occ].astype(float)
    yaw = m.endpoint_yaw[rows, cols][occ]
    return float(math.atan2(float(np.sum(w * np.sin(yaw))), float(np.sum(w * np.cos(yaw)))))


def interp_token(endpoint: Pose, length: int = TOKEN_LENGTH, agent_type=AgentType.VEHICLE) -> Trajectory:
    """Cubic Hermite curve from the origin (heading +x) to ``endpoint``.

    Both tangents have the chord length as magnitude; the curve is sampled at
    ``1/L, ..., 1`` and each yaw is the tangent direction there.
    """
    ex, ey = endpoint.x, endpoint.y
    chord = math.hypot(ex, ey)
    if chord < 1e-6:
        warnings.warn(f"endpoint ({ex}, {ey}) is at the origin; emitting a zero trajectory",
                      DegenerateEndpointWarning, stacklevel=2)
        return Trajectory(np.zeros((length, 3)), agent_type)
    s = np.arange(1, length + 1) / length
    h10 = s ** 3 - 2 * s ** 2 + s
    h01 = -2 * s ** 3 + 3 * s ** 2
    h11 = s ** 3 - s ** 2
    d10 = 3 * s ** 2 - 4 * s + 1
    d01 = -6 * s ** 2 + 6 * s
    d11 = 3 * s ** 2 - 2 * s
    tx, ty = chord * math.cos(endpoint.yaw), chord * math.sin(endpoint.yaw)
    pts = np.empty((length, 3))
    pts[:, 0] = h10 * chord + h01 * ex + h11 * tx
    pts[:, 1] = h01 * ey + h11 * ty
    pts[:, 2] = np.arctan2(d01 * ey + d11 * ty, d10 * chord + d01 * ex + d11 * tx)
    pts[-1] = (ex, ey, endpoint.yaw)
    return Trajectory(pts, agent_type)


def _single_agent_type(d: NormalizedDataset, agent_type) -> tuple[NormalizedDataset, AgentType]:
    if agent_type is not None:
        agent_type = AgentType.parse(agent_type)
        if any(t is not agent_type for t in d.agent_types):
            d = d.of_type(agent_type)
        return d, agent_type
    kinds = set(d.agent_types)
    if not kinds:
        raise EmptyDataset("dataset is empty")
    if len(kinds) > 1:
        raise ValueError(f"dataset mixes agent types {sorted(str(t) for t in kinds)}; pass agent_type")
    return d, kinds.pop()


def build_vocabulary(d: NormalizedDataset, grid: GridSpec | None = None, k: int = DEFAULT_K,
                     tau_filter: int = DEFAULT_TAU_FILTER, tau_expand: int = DEFAULT_TAU_EXPAND,
                     agent_type=None) -> Vocabulary:
    """Build a TrajTok vocabulary: one token per valid cell, ids in row-major cell order."""
    check_thresholds(k, tau_filter, tau_expand)
    d, agent_type = _single_agent_type(d, agent_type)
    if grid is None:
        grid = default_grid(agent_type)
    if len(d) == 0:
        raise EmptyDataset("dataset is empty")
    m = build_occupancy(grid, d, k)
    cls = classify_cells(m, tau_filter, tau_expand)
    L = d.length

    counts = m.count.reshape(-1)
    valid_flat = np.flatnonzero(cls.valid.reshape(-1))
    mean_cells = valid_flat[counts[valid_flat] > 0]

    # per-cell sums accumulated in dataset order
    means = {}
    if mean_cells.size:
        ends = d.endpoints
        i, j, inside = bin_endpoints(grid, ends[:, 0], ends[:, 1])
        flat = i * grid.W + j
        sel = inside & np.isin(flat, mean_cells)
        p = d.points[sel]
        remap = np.searchsorted(mean_cells, flat[sel])
        n = mean_cells.size
        cnt = counts[mean_cells].astype(float)
        out = np.empty((n, L, 3))
        for l in range(L):
            for axis in (0, 1):
                out[:, l, axis] = np.bincount(remap, weights=p[:, l, axis], minlength=n) / cnt
            sn = np.bincount(remap, weights=np.sin(p[:, l, 2]), minlength=n)
            cs = np.bincount(remap, weights=np.cos(p[:, l, 2]), minlength=n)
            out[:, l, 2] = np.arctan2(sn, cs)
        means = {int(c): out[r] for r, c in enumerate(mean_cells)}

    trajectories, cells, sources = [], [], []
    for c in valid_flat:
        i, j = divmod(int(c), grid.W)
        if counts[c] > 0:
            trajectories.append(means[int(c)])
            sources.append(TokenSource.MEAN)
        else:
            cx, cy = grid.cell_center(i, j)
            yaw = estimate_cell_yaw(m, (i, j), k)
            trajectories.append(interp_token(Pose(cx, cy, yaw), L, agent_type).points)
            sources.append(TokenSource.INTERPOLATED)
        cells.append((i, j))

    report = {
        "n_input": m.n_input,
        "n_dropped_out_of_range": m.n_dropped,
        "n_dropped_upstream": int(d.drop_count),
        "flip_applied": int(d.flip_applied),
        "occupied_cells": int(m.occupied.sum()),
        **{f"cells_{name}": n for name, n in cls.counts().items()},
        "vocab_size": len(trajectories),
    }
    params = {"tokenizer": "trajtok", "k": int(k), "tau_filter": int(tau_filter),
              "tau_expand": int(tau_expand), "L": int(L)}
    return make_vocabulary(agent_type, grid, trajectories, cells, sources, params, report)


def full_grid_vocabulary(grid: GridSpec, agent_type=AgentType.VEHICLE, length: int = TOKEN_LENGTH) -> Vocabulary:
    """Rule-based baseline: one token per cell, no data.

    Each token is a Hermite curve to the cell center whose terminal heading is
    that of the circular arc through the origin tangent to +x.
    """
    agent_type = AgentType.parse(agent_type)
    trajectories, cells = [], []
    for i in range(grid.H):
        for j in range(grid.W):
            cx, cy = grid.cell_center(i, j)
            yaw = 2.0 * math.atan2(cy, cx)
            trajectories.append(interp_token(Pose(cx, cy, yaw), length, agent_type).points)
            cells.append((i, j))
    params = {"tokenizer": "full-grid", "L": int(length)}
    return make_vocabulary(agent_type, grid, trajectories, cells,
                           [TokenSource.INTERPOLATED] * len(cells), params, {"vocab_size": len(cells)})
