"""Nearest-token encoding, decoding and label-smoothing targets."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import Trajectory
from .errors import (
    AgentTypeMismatch,
    BadEpsilon,
    BadIndex,
    EmptyVocabulary,
    IndexOutOfRange,
    LengthMismatch,
)
from .vocab import Vocabulary

DEFAULT_EPS = 0.1
DEFAULT_EPS1 = 0.01  # m^2


def token_distance(a: Trajectory, b: Trajectory) -> float:
    """Mean over the L points of the squared (x, y) distance. Yaw is ignored."""
    if len(a) != len(b):
        raise LengthMismatch(f"cannot compare trajectories of length {len(a)} and {len(b)}")
    diff = a.points[:, :2] - b.points[:, :2]
    return float((diff * diff).sum() / len(a))


def _check_query(v: Vocabulary, points: np.ndarray) -> None:
    if len(v) == 0:
        raise EmptyVocabulary("cannot encode against an empty vocabulary")
    if points.shape[-2] != v.points.shape[1]:
        raise LengthMismatch(f"query length {points.shape[-2]} does not match token length {v.points.shape[1]}")


def encode_points(v: Vocabulary, points: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """Encode a ``(N, L, 3)`` batch. Brute force over all tokens.

    Squared distances come from the Gram expansion; every token within a
    rounding margin of the row minimum is then re-scored exactly so that ties
    resolve to the lowest id.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 2:
        points = points[None]
    _check_query(v, points)
    n = points.shape[0]
    C = np.ascontiguousarray(v.points[:, :, :2].reshape(len(v), -1))
    c2 = np.einsum("ij,ij->i", C, C)
    c2max = float(c2.max())
    Q_all = np.ascontiguousarray(points[:, :, :2].reshape(n, -1))
    out = np.empty(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        Q = Q_all[lo:lo + chunk]
        q2 = np.einsum("ij,ij->i", Q, Q)
        approx = q2[:, None] + c2[None, :] - 2.0 * (Q @ C.T)
        best = approx.min(axis=1)
        margin = 1e-10 * (q2 + c2max) + 1e-12
        rows, cols = np.nonzero(approx <= (best + margin)[:, None])
        diff = Q[rows] - C[cols]
        exact = (diff * diff).sum(axis=1)
        order = np.lexsort((cols, exact, rows))
        first = np.unique(rows[order], return_index=True)[1]
        out[lo + rows[order][first]] = cols[order][first]
    return out


def encode(v: Vocabulary, t: Trajectory) -> int:
    """Id of the token closest to ``t`` under :func:`token_distance`; ties go to the lowest id."""
    if len(v) and t.agent_type is not v.agent_type:
        raise AgentTypeMismatch(f"trajectory is {t.agent_type}, vocabulary is {v.agent_type}")
    return int(encode_points(v, t.points[None])[0])


def decode(v: Vocabulary, token_id: int) -> Trajectory:
    if not 0 <= token_id < len(v):
        raise IndexOutOfRange(f"token id {token_id} outside [0, {len(v)})")
    return v.tokens[token_id].trajectory


def decode_points(v: Vocabulary, ids) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= len(v)):
        raise IndexOutOfRange(f"token ids must lie in [0, {len(v)})")
    return v.points[ids]


class SmoothingMode(enum.Enum):
    UNIFORM = "uniform"
    SPATIAL = "spatial"


@dataclass(frozen=True, eq=False)
class SmoothingTargets:
    probs: np.ndarray
    gt_index: int
    mode: SmoothingMode


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise BadEpsilon(f"epsilon must lie in (0, 1), got {eps}")


def _check_gt(size: int, gt: int) -> None:
    if size < 2:
        raise BadIndex(f"label smoothing needs at least 2 classes, got {size}")
    if int(gt) != gt or not 0 <= gt < size:
        raise BadIndex(f"ground-truth index {gt} outside [0, {size})")


def smoothing_targets_uniform(size: int, gt: int, eps: float = DEFAULT_EPS,
                              normalized: bool = False) -> SmoothingTargets:
    """Standard label smoothing.

    With ``normalized=False`` every other class gets ``eps / size``, so the
    vector sums to ``1 - eps / size``. ``normalized=True`` spreads ``eps``
    over the ``size - 1`` other classes instead.
    """
    _check_eps(eps)
    _check_gt(size, gt)
    other = eps / (size - 1) if normalized else eps / size
    probs = np.full(size, other)
    probs[gt] = 1.0 - eps
    probs.setflags(write=False)
    return SmoothingTargets(probs, int(gt), SmoothingMode.UNIFORM)


def smoothing_targets_spatial(v: Vocabulary, gt: int, eps: float = DEFAULT_EPS,
                              eps1: float = DEFAULT_EPS1) -> SmoothingTargets:
    """Spread ``eps`` over non-target tokens in proportion to ``1 / (d^2 + eps1)``."""
    _check_eps(eps)
    _check_gt(len(v), gt)
    if not eps1 > 0:
        raise BadEpsilon(f"eps1 must be positive, got {eps1}")
    P = v.points[:, :, :2]
    diff = P - P[gt]
    d2 = (diff * diff).sum(axis=(1, 2)) / P.shape[1]
    return spatial_targets_from_distances(d2, gt, eps, eps1)


def spatial_targets_from_distances(d2: np.ndarray, gt: int, eps: float = DEFAULT_EPS,
                                   eps1: float = DEFAULT_EPS1) -> SmoothingTargets:
    d2 = np.asarray(d2, dtype=float)
    _check_eps(eps)
    _check_gt(d2.size, gt)
    k = 1.0 / (d2 + eps1)
    k[gt] = 0.0
    probs = eps * k / k.sum()
    probs[gt] = 1.0 - eps
    probs.setflags(write=False)
    return SmoothingTargets(probs, int(gt), SmoothingMode.SPATIAL)
