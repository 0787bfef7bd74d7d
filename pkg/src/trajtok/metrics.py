"""Quantitative checks on a vocabulary: coverage, symmetry, utilization, robustness."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .codec import encode_points
from .core import AgentType, NormalizedDataset, flip_points
from .errors import EmptyDataset, EmptyVocabulary
from .grid import bin_endpoints, window_count
from .vocab import GridSpec, Vocabulary

DEFAULT_DELTAS = (0.1, 0.25, 0.5)
REPORT_VERSION = "trajtok-report v1"


def _require(v: Vocabulary, held_out: NormalizedDataset | None = None) -> None:
    if len(v) == 0:
        raise EmptyVocabulary("vocabulary is empty")
    if held_out is not None and len(held_out) == 0:
        raise EmptyDataset("held-out dataset is empty")


def endpoint_errors(v: Vocabulary, held_out: NormalizedDataset) -> np.ndarray:
    """Euclidean endpoint error of each held-out trajectory after encode/decode."""
    _require(v, held_out)
    ids = encode_points(v, held_out.points)
    return np.hypot(*(held_out.endpoints[:, :2] - v.endpoints[ids, :2]).T)


def reconstruction_error(v: Vocabulary, held_out: NormalizedDataset) -> tuple[float, float]:
    err = endpoint_errors(v, held_out)
    return float(err.mean()), float(err.max())


def coverage(v: Vocabulary, held_out: NormalizedDataset,
             deltas: Sequence[float] = DEFAULT_DELTAS) -> dict[float, float]:
    err = endpoint_errors(v, held_out)
    return {float(d): float(np.mean(err <= d)) for d in deltas}


def _angle_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.mod(a - b + np.pi, 2 * np.pi) - np.pi
    return np.abs(d)


def mirror_matches(v: Vocabulary, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """For each token: whether its mirror endpoint is in range, and whether a mirror token exists.

    A mirror token matches ``flip(t)`` within ``tol`` on x, y and yaw (mod 2 pi)
    at every point.
    """
    pts = v.points
    n = pts.shape[0]
    flipped = flip_points(pts)
    fe = flipped[:, -1, :2]
    g = v.grid
    in_range = (fe[:, 0] >= g.x_min) & (fe[:, 0] < g.x_max) & (fe[:, 1] >= g.y_min) & (fe[:, 1] < g.y_max)
    matched = np.zeros(n, dtype=bool)
    if n == 0:
        return in_range, matched
    tree = cKDTree(pts[:, -1, :2])
    for a, cands in enumerate(tree.query_ball_point(fe, tol * math.sqrt(2.0) + 1e-15)):
        for b in cands:
            diff_xy = np.abs(pts[b, :, :2] - flipped[a, :, :2])
            if diff_xy.max() <= tol and _angle_diff(pts[b, :, 2], flipped[a, :, 2]).max() <= tol:
                matched[a] = True
                break
    return in_range, matched


def symmetry_score(v: Vocabulary, tol: float = 1e-9) -> float:
    """Fraction of tokens (with in-range mirror endpoint) whose mirror is also a token.

    Returns 1.0 when no token qualifies.
    """
    _require(v)
    in_range, matched = mirror_matches(v, tol)
    if not in_range.any():
        return 1.0
    return float(matched[in_range].mean())


def utilization(v: Vocabulary, held_out: NormalizedDataset) -> float:
    _require(v, held_out)
    ids = encode_points(v, held_out.points)
    return float(np.unique(ids).size / len(v))


def token_keys(v: Vocabulary) -> set:
    """Cell of each token, or its exact endpoint when it falls outside the grid."""
    keys = set()
    for tok in v.tokens:
        if tok.cell is not None:
            keys.add(tok.cell)
        else:
            e = tok.trajectory.points[-1]
            keys.add(("outside", float(e[0]), float(e[1])))
    return keys


def _builder(builder) -> Callable[[NormalizedDataset], Vocabulary]:
    return builder.build if hasattr(builder, "build") else builder


def robustness_probe(builder, d: NormalizedDataset, noise: NormalizedDataset | Sequence) -> int:
    """Size of the symmetric difference of token cell sets with and without ``noise``."""
    if not isinstance(noise, NormalizedDataset):
        noise = NormalizedDataset.from_trajectories(list(noise), length=d.length)
    build = _builder(builder)
    if len(noise) == 0:
        return 0
    clean = build(d)
    noisy = build(d.concat(noise))
    return len(token_keys(clean) ^ token_keys(noisy))


def isolated_noise(grid: GridSpec, d: NormalizedDataset, n: int, k: int, seed: int = 0,
                   agent_type=None) -> NormalizedDataset:
    """``n`` straight-line trajectories to cell centers at least ``k`` cells
    (Chebyshev) from every occupied cell and from each other."""
    ends = d.endpoints
    i, j, inside = bin_endpoints(grid, ends[:, 0], ends[:, 1])
    occ = np.zeros(grid.shape, dtype=np.int64)
    occ[i[inside], j[inside]] = 1
    blocked = window_count(occ, 2 * k - 1) > 0
    rng = np.random.default_rng(seed)
    chosen = []
    for c in rng.permutation(np.flatnonzero(~blocked.reshape(-1))):
        if len(chosen) == n:
            break
        ci, cj = divmod(int(c), grid.W)
        if blocked[ci, cj]:
            continue
        chosen.append((ci, cj))
        blocked[max(ci - k + 1, 0):ci + k, max(cj - k + 1, 0):cj + k] = True
    if len(chosen) < n:
        raise ValueError(f"only {len(chosen)} isolated cells available, {n} requested")
    if agent_type is None:
        agent_type = d.agent_types[0] if len(d) else AgentType.VEHICLE
    L = d.length
    frac = np.arange(1, L + 1) / L
    pts = np.empty((n, L, 3))
    for r, (ci, cj) in enumerate(chosen):
        cx, cy = grid.cell_center(ci, cj)
        pts[r, :, 0] = frac * cx
        pts[r, :, 1] = frac * cy
        pts[r, :, 2] = math.atan2(cy, cx)
    return NormalizedDataset.from_array(pts, agent_type)


@dataclass
class EvalReport:
    vocab_size: int
    recon_mean: float
    recon_max: float
    coverage: dict[float, float] = field(default_factory=dict)
    symmetry_score: float = 1.0
    utilization: float = 0.0
    robustness_delta: int | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["coverage"] = {repr(k): v for k, v in self.coverage.items()}
        return out

    def to_text(self) -> str:
        lines = [f"# {REPORT_VERSION}", f"vocab_size={self.vocab_size}",
                 f"recon_mean={self.recon_mean!r}", f"recon_max={self.recon_max!r}"]
        lines += [f"coverage@{d!r}={c!r}" for d, c in self.coverage.items()]
        lines += [f"symmetry_score={self.symmetry_score!r}", f"utilization={self.utilization!r}"]
        if self.robustness_delta is not None:
            lines.append(f"robustness_delta={self.robustness_delta}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"format": REPORT_VERSION, **self.to_dict()}, indent=2, sort_keys=True) + "\n"


def evaluate(v: Vocabulary, held_out: NormalizedDataset, deltas: Sequence[float] = DEFAULT_DELTAS,
             sym_tol: float = 1e-9, robustness_delta: int | None = None) -> EvalReport:
    _require(v, held_out)
    ids = encode_points(v, held_out.points)
    err = np.hypot(*(held_out.endpoints[:, :2] - v.endpoints[ids, :2]).T)
    return EvalReport(
        vocab_size=len(v),
        recon_mean=float(err.mean()),
        recon_max=float(err.max()),
        coverage={float(d): float(np.mean(err <= d)) for d in deltas},
        symmetry_score=symmetry_score(v, sym_tol),
        utilization=float(np.unique(ids).size / len(v)),
        robustness_delta=robustness_delta,
    )
